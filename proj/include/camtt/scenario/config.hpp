#pragma once

#include "camtt/core.hpp"
#include "camtt/motion.hpp"

#include <cmath>
#include <string>

namespace camtt::scenario {

/// Staring radar geometry and waveform.
struct RadarConfig {
  double prf = 1000.0;               // Hz
  double carrier_frequency = 9.0e9;  // Hz
  double range_bin_size = 15.0;      // m
  double range_offset = 0.0;         // m, start of bin 0
  int num_range_bins = 96;
  int pulses_per_scan = 512;

  [[nodiscard]] double wavelength() const { return wavelength_from_carrier(carrier_frequency); }
  [[nodiscard]] double pri() const { return 1.0 / prf; }
  /// Range coordinate of the centre of bin `m`.
  [[nodiscard]] double bin_center(int m) const { return range_offset + (m + 0.5) * range_bin_size; }
  [[nodiscard]] double range_extent() const { return num_range_bins * range_bin_size; }

  void validate() const {
    require(prf > 0.0, "radar.prf must be positive");
    require(carrier_frequency > 0.0, "radar.carrier_frequency must be positive");
    require(range_bin_size > 0.0, "radar.range_bin_size must be positive");
    require(num_range_bins >= 1, "radar.num_range_bins must be >= 1");
    require(pulses_per_scan >= 1, "radar.pulses_per_scan must be >= 1");
  }
};

enum class ClutterModel { k_distributed, gaussian, none };

inline std::string to_string(ClutterModel m) {
  switch (m) {
    case ClutterModel::k_distributed: return "k-distributed";
    case ClutterModel::gaussian: return "gaussian";
    case ClutterModel::none: return "none";
  }
  return "none";
}

inline ClutterModel clutter_model_from_string(const std::string& s) {
  if (s == "k-distributed" || s == "k") return ClutterModel::k_distributed;
  if (s == "gaussian") return ClutterModel::gaussian;
  if (s == "none") return ClutterModel::none;
  throw ConfigError("unknown clutter model '" + s + "'");
}

/// Compound-Gaussian sea clutter: gamma texture times Gaussian-spectrum speckle.
///
/// `mean_power` is the clutter reference power P_c that the SCR is defined
/// against; it is used even when `model == none` so targets keep their power.
struct ClutterParams {
  ClutterModel model = ClutterModel::k_distributed;
  double shape = 0.8;                       // gamma texture shape nu
  double mean_doppler = 15.0;               // Hz
  double spectral_width = 12.0;             // Hz, std of the Gaussian spectrum
  double texture_correlation = 0.999;       // per-pulse AR(1) coefficient
  double scan_texture_correlation = 0.97;   // texture persistence between scans
  double range_texture_correlation = 0.6;   // AR(1) coefficient across range bins
  double mean_power = 1.0;                  // P_c
  double noise_power = 1.0e-3;              // thermal noise floor, linear

  void validate() const {
    require(shape > 0.0, "clutter.shape must be > 0");
    require(spectral_width > 0.0, "clutter.spectral_width must be > 0");
    require(texture_correlation >= 0.0 && texture_correlation < 1.0,
            "clutter.texture_correlation must lie in [0,1)");
    require(scan_texture_correlation >= 0.0 && scan_texture_correlation < 1.0,
            "clutter.scan_texture_correlation must lie in [0,1)");
    require(range_texture_correlation >= 0.0 && range_texture_correlation < 1.0,
            "clutter.range_texture_correlation must lie in [0,1)");
    require(mean_power >= 0.0, "clutter.mean_power must be >= 0");
    require(noise_power >= 0.0, "clutter.noise_power must be >= 0");
  }
};

struct ScenarioConfig {
  RadarConfig radar;
  ClutterParams clutter;

  int num_scans = 15;
  double scan_interval = 10.0;   // s, transition interval between scans
  double sigma_accel = 1.0e-4;   // m/s^3
  int num_targets = 4;

  // Placement bounds: every trajectory stays inside [range_min, range_max].
  double range_min = 150.0;
  double range_max = 1290.0;
  double doppler_min = -400.0;   // Hz
  double doppler_max = 300.0;    // Hz
  double radial_length_min = 5.0;
  double radial_length_max = 30.0;

  // Target fluctuation a(p): AR(1) on log-amplitude.
  double rcs_correlation = 0.99;
  double rcs_log_sigma = 0.3;

  void validate() const {
    radar.validate();
    clutter.validate();
    require(num_scans >= 1, "scenario.num_scans must be >= 1");
    require(scan_interval > 0.0, "scenario.scan_interval must be > 0");
    require(sigma_accel >= 0.0, "scenario.sigma_accel must be >= 0");
    require(num_targets >= 0, "scenario.num_targets must be >= 0");
    require(range_min <= range_max, "scenario.range_min must not exceed range_max");
    require(doppler_min <= doppler_max, "scenario.doppler_min must not exceed doppler_max");
    require(radial_length_min <= radial_length_max,
            "scenario.radial_length_min must not exceed radial_length_max");
    require(radial_length_min > 0.0, "scenario.radial_length_min must be > 0");
    require(rcs_correlation >= 0.0 && rcs_correlation < 1.0,
            "scenario.rcs_correlation must lie in [0,1)");
    require(rcs_log_sigma >= 0.0, "scenario.rcs_log_sigma must be >= 0");
  }
};

}  // namespace camtt::scenario
