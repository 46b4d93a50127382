#pragma once

#include "camtt/core.hpp"
#include "camtt/fft.hpp"
#include "camtt/scenario/config.hpp"
#include "camtt/scenario/truth.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace camtt::scenario {

/// Slow-time samples of one scan: M range bins by P pulses.
struct PulseMatrix {
  Grid<Complex> samples;  // (range bin, pulse)
  double prf = 1000.0;
  double wavelength = 0.0333;
  double range_bin_size = 15.0;
  double range_offset = 0.0;
  int scan_index = 0;

  [[nodiscard]] std::size_t num_range_bins() const { return samples.rows(); }
  [[nodiscard]] std::size_t num_pulses() const { return samples.cols(); }
};

inline PulseMatrix make_pulse_matrix(const RadarConfig& radar, int scan_index) {
  PulseMatrix pm;
  pm.samples = Grid<Complex>(static_cast<std::size_t>(radar.num_range_bins),
                             static_cast<std::size_t>(radar.pulses_per_scan));
  pm.prf = radar.prf;
  pm.wavelength = radar.wavelength();
  pm.range_bin_size = radar.range_bin_size;
  pm.range_offset = radar.range_offset;
  pm.scan_index = scan_index;
  return pm;
}

// ---- Target component ----

/// Fraction of the radial extent [center - length/2, center + length/2]
/// falling in each range bin. Sums to 1 when the extent is inside the grid.
inline std::vector<double> range_bin_weights(double center, double length, double bin_size,
                                             double range_offset, std::size_t num_bins) {
  std::vector<double> w(num_bins, 0.0);
  const double lo = center - 0.5 * length;
  const double hi = center + 0.5 * length;
  for (std::size_t m = 0; m < num_bins; ++m) {
    const double b0 = range_offset + static_cast<double>(m) * bin_size;
    const double b1 = b0 + bin_size;
    const double overlap = std::min(hi, b1) - std::max(lo, b0);
    if (overlap > 0.0) w[m] = overlap / length;
  }
  return w;
}

/// Positive, correlated fluctuation a(p): exp of a stationary AR(1) process
/// on log-amplitude, rescaled to unit mean power over the sequence.
inline std::vector<double> rcs_sequence(std::size_t pulses, double correlation, double log_sigma,
                                        Rng& rng) {
  std::vector<double> a(pulses, 1.0);
  if (pulses == 0 || log_sigma == 0.0) return a;
  std::normal_distribution<double> n01(0.0, 1.0);
  const double innov = std::sqrt(1.0 - correlation * correlation);
  double u = n01(rng);
  double power = 0.0;
  for (std::size_t p = 0; p < pulses; ++p) {
    if (p > 0) u = correlation * u + innov * n01(rng);
    a[p] = std::exp(log_sigma * u);
    power += a[p] * a[p];
  }
  const double scale = 1.0 / std::sqrt(power / static_cast<double>(pulses));
  for (double& v : a) v *= scale;
  return a;
}

/// Adds the fluctuating point-extent return of one target to `pm`:
/// sqrt(P_t w(m)) a(p) exp(j(phase + 4 pi R(p) / lambda)).
inline void add_target_return(PulseMatrix& pm, const Vec3& state, double radial_length,
                              double total_power, std::span<const double> fluctuation,
                              double phase) {
  const std::size_t nb = pm.num_range_bins();
  const std::size_t np = pm.num_pulses();
  if (fluctuation.size() != np) throw SizeError("fluctuation length must equal pulse count");
  const auto w = range_bin_weights(state(0), radial_length, pm.range_bin_size, pm.range_offset, nb);
  const double pri = 1.0 / pm.prf;
  const double k = 4.0 * kPi / pm.wavelength;
  for (std::size_t p = 0; p < np; ++p) {
    const double t = static_cast<double>(p) * pri;
    const double r = state(0) + state(1) * t + 0.5 * state(2) * t * t;
    const Complex carrier = std::polar(fluctuation[p], phase + k * r);
    for (std::size_t m = 0; m < nb; ++m) {
      if (w[m] > 0.0) pm.samples(m, p) += std::sqrt(total_power * w[m]) * carrier;
    }
  }
}

// ---- Clutter component ----

/// Lookup table mapping a standard normal z to a unit-mean gamma(nu) texture
/// value through the Gaussian copula.
class TextureTable {
 public:
  explicit TextureTable(double shape, double z_max = 8.0, std::size_t nodes = 4097)
      : z_max_(z_max), step_(2.0 * z_max / static_cast<double>(nodes - 1)), values_(nodes) {
    for (std::size_t i = 0; i < nodes; ++i) {
      const double z = -z_max + step_ * static_cast<double>(i);
      const double lower = 0.5 * boost::math::erfc(-z / std::sqrt(2.0));
      const double upper = 0.5 * boost::math::erfc(z / std::sqrt(2.0));
      double g = 0.0;
      if (lower <= 0.0) g = 0.0;
      else if (upper <= 0.0) g = boost::math::gamma_q_inv(shape, 1e-300);
      else if (z < 0.0) g = boost::math::gamma_p_inv(shape, lower);
      else g = boost::math::gamma_q_inv(shape, upper);
      values_[i] = g / shape;
    }
  }

  [[nodiscard]] double operator()(double z) const {
    const double x = (std::clamp(z, -z_max_, z_max_) + z_max_) / step_;
    const auto i = std::min(static_cast<std::size_t>(x), values_.size() - 2);
    const double f = x - static_cast<double>(i);
    return values_[i] * (1.0 - f) + values_[i + 1] * f;
  }

 private:
  double z_max_;
  double step_;
  std::vector<double> values_;
};

/// Normalized Gaussian Doppler power spectrum sampled on the `n` FFT bins of
/// a slow-time sequence. Entries sum to 1; the mean is wrapped onto the
/// unambiguous interval.
inline std::vector<double> clutter_spectrum(const ClutterParams& c, double prf, std::size_t n) {
  std::vector<double> s(n, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // A return at Doppler f carries slow-time frequency -f.
    const double doppler = -static_cast<double>(signed_frequency_index(k, n)) * prf / static_cast<double>(n);
    double d = std::remainder(doppler - c.mean_doppler, prf);
    s[k] = std::exp(-0.5 * d * d / (c.spectral_width * c.spectral_width));
    total += s[k];
  }
  for (double& v : s) v /= total;
  return s;
}

/// Stateful clutter generator; the texture field persists between scans.
class ClutterGenerator {
 public:
  ClutterGenerator(const ClutterParams& params, const RadarConfig& radar, std::uint64_t seed)
      : params_(params),
        radar_(radar),
        rng_(make_rng(seed, 0x636c7574ULL)),
        table_(params.model == ClutterModel::k_distributed ? params.shape : 1.0),
        spectrum_(clutter_spectrum(params, radar.prf, static_cast<std::size_t>(radar.pulses_per_scan))),
        field_(static_cast<std::size_t>(radar.num_range_bins), 0.0) {
    params_.validate();
    if (params_.model == ClutterModel::k_distributed) {
      auto w = range_innovation();
      for (std::size_t m = 0; m < field_.size(); ++m) field_[m] = w[m];
    }
  }

  /// Adds clutter and thermal noise for the next scan in sequence.
  void add_next_scan(PulseMatrix& pm) {
    const std::size_t nb = pm.num_range_bins();
    const std::size_t np = pm.num_pulses();
    if (nb != field_.size() || np != spectrum_.size()) throw SizeError("pulse matrix does not match clutter generator");
    std::normal_distribution<double> n01(0.0, 1.0);

    if (params_.model != ClutterModel::none && params_.mean_power > 0.0) {
      Grid<double> texture(nb, np, 1.0);
      if (params_.model == ClutterModel::k_distributed) {
        if (scans_ > 0) {
          const double rho = params_.scan_texture_correlation;
          auto w = range_innovation();
          for (std::size_t m = 0; m < nb; ++m) field_[m] = rho * field_[m] + std::sqrt(1.0 - rho * rho) * w[m];
        }
        const double rho = params_.texture_correlation;
        const double innov = std::sqrt(1.0 - rho * rho);
        for (std::size_t p = 0; p < np; ++p) {
          if (p > 0) {
            auto w = range_innovation();
            for (std::size_t m = 0; m < nb; ++m) field_[m] = rho * field_[m] + innov * w[m];
          }
          for (std::size_t m = 0; m < nb; ++m) texture(m, p) = table_(field_[m]);
        }
      }

      auto& inverse = cached_dft(np, UnitaryDft::Direction::inverse);
      std::vector<Complex> spectrum(np), speckle(np);
      const double half = std::sqrt(0.5);
      for (std::size_t m = 0; m < nb; ++m) {
        for (std::size_t k = 0; k < np; ++k) {
          const double amp = std::sqrt(static_cast<double>(np) * spectrum_[k]) * half;
          spectrum[k] = Complex(amp * n01(rng_), amp * n01(rng_));
        }
        inverse.transform(spectrum, speckle);
        for (std::size_t p = 0; p < np; ++p) {
          pm.samples(m, p) += std::sqrt(params_.mean_power * texture(m, p)) * speckle[p];
        }
      }
    }

    if (params_.noise_power > 0.0) {
      const double sd = std::sqrt(0.5 * params_.noise_power);
      for (auto& v : pm.samples.values()) v += Complex(sd * n01(rng_), sd * n01(rng_));
    }
    ++scans_;
  }

 private:
  std::vector<double> range_innovation() {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double rho = params_.range_texture_correlation;
    const double innov = std::sqrt(1.0 - rho * rho);
    std::vector<double> w(field_.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
      const double e = n01(rng_);
      w[m] = m == 0 ? e : rho * w[m - 1] + innov * e;
    }
    return w;
  }

  ClutterParams params_;
  RadarConfig radar_;
  Rng rng_;
  TextureTable table_;
  std::vector<double> spectrum_;
  std::vector<double> field_;
  int scans_ = 0;
};

// ---- Full synthesis ----

inline double target_power_for_scr(double scr_db, double clutter_power) {
  return std::pow(10.0, scr_db / 10.0) * clutter_power;
}

/// Pulse matrices for every scan: targets at the prescribed SCR embedded in
/// clutter plus noise. Deterministic given (truth, config, seed).
inline std::vector<PulseMatrix> synthesize_returns(const std::vector<TruthTarget>& truth,
                                                   const ScenarioConfig& cfg, double scr_db,
                                                   std::uint64_t seed) {
  cfg.validate();
  require(std::isfinite(scr_db), "SCR must be finite");
  const double p_t = target_power_for_scr(scr_db, cfg.clutter.mean_power);
  ClutterGenerator clutter(cfg.clutter, cfg.radar, seed);
  Rng target_rng = make_rng(seed, 0x74677472ULL);
  std::uniform_real_distribution<double> phase(-kPi, kPi);

  std::vector<PulseMatrix> scans;
  scans.reserve(static_cast<std::size_t>(cfg.num_scans));
  for (int k = 0; k < cfg.num_scans; ++k) {
    PulseMatrix pm = make_pulse_matrix(cfg.radar, k);
    for (const auto& t : truth) {
      if (!t.alive_at(k)) continue;
      auto a = rcs_sequence(pm.num_pulses(), cfg.rcs_correlation, cfg.rcs_log_sigma, target_rng);
      add_target_return(pm, t.state_at(k), t.radial_length, p_t, a, phase(target_rng));
    }
    clutter.add_next_scan(pm);
    scans.push_back(std::move(pm));
  }
  return scans;
}

}  // namespace camtt::scenario
