#pragma once

#include "camtt/core.hpp"
#include "camtt/motion.hpp"
#include "camtt/scenario/config.hpp"

#include <optional>
#include <random>
#include <vector>

namespace camtt::scenario {

/// Ground-truth trajectory. `states[k - birth_scan]` is the state at scan k.
struct TruthTarget {
  int id = 0;
  std::vector<Vec3> states;  // (range m, range-rate m/s, accel m/s^2)
  double radial_length = 10.0;
  int birth_scan = 0;
  int death_scan = 0;  // inclusive

  [[nodiscard]] bool alive_at(int scan) const { return scan >= birth_scan && scan <= death_scan; }
  [[nodiscard]] const Vec3& state_at(int scan) const {
    return states.at(static_cast<std::size_t>(scan - birth_scan));
  }
};

/// Lower Cholesky factor of the process noise, zero when the noise vanishes.
inline Mat3 process_noise_factor(double dt, double sigma_accel) {
  if (sigma_accel == 0.0) return Mat3::Zero();
  Eigen::LLT<Mat3> llt(ca_process_noise(dt, sigma_accel));
  if (llt.info() != Eigen::Success) throw RuntimeError("process noise is not positive definite");
  return llt.matrixL();
}

/// One CA step: F x + L n with n three standard normals drawn in order.
/// The draws happen even when L is zero so the stream layout is fixed.
inline Vec3 propagate_state(const Vec3& x, const Mat3& transition, const Mat3& noise_factor,
                            Rng& rng, std::normal_distribution<double>& n01) {
  Vec3 n;
  n(0) = n01(rng);
  n(1) = n01(rng);
  n(2) = n01(rng);
  return transition * x + noise_factor * n;
}

/// Propagates explicit initial states over `num_scans` scans.
inline std::vector<TruthTarget> propagate_truth(const ScenarioConfig& cfg,
                                                const std::vector<Vec3>& initial_states,
                                                const std::vector<double>& radial_lengths,
                                                std::uint64_t seed) {
  cfg.validate();
  require(initial_states.size() == radial_lengths.size(),
          "initial_states and radial_lengths differ in size");
  const Mat3 f = ca_transition(cfg.scan_interval);
  const Mat3 l = process_noise_factor(cfg.scan_interval, cfg.sigma_accel);
  Rng rng = make_rng(seed, 0x70726f70ULL);
  std::normal_distribution<double> n01(0.0, 1.0);

  std::vector<TruthTarget> out;
  out.reserve(initial_states.size());
  for (std::size_t i = 0; i < initial_states.size(); ++i) {
    TruthTarget t;
    t.id = static_cast<int>(i) + 1;
    t.radial_length = radial_lengths[i];
    t.birth_scan = 0;
    t.death_scan = cfg.num_scans - 1;
    t.states.reserve(static_cast<std::size_t>(cfg.num_scans));
    t.states.push_back(initial_states[i]);
    for (int k = 1; k < cfg.num_scans; ++k) t.states.push_back(propagate_state(t.states.back(), f, l, rng, n01));
    out.push_back(std::move(t));
  }
  return out;
}

/// Samples `num_targets` trajectories inside the placement bounds, then
/// propagates them with the CA model. Deterministic for a given seed.
inline std::vector<TruthTarget> generate_truth(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const double lambda = cfg.radar.wavelength();
  const double duration = cfg.scan_interval * (cfg.num_scans - 1);
  Rng rng = make_rng(seed, 0x74727574ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Vec3> init;
  std::vector<double> lengths;
  for (int i = 0; i < cfg.num_targets; ++i) {
    const double doppler = cfg.doppler_min + (cfg.doppler_max - cfg.doppler_min) * unit(rng);
    const double rate = range_rate_from_doppler(doppler, lambda);
    const double travel = rate * duration;
    const double lo = cfg.range_min - std::min(0.0, travel);
    const double hi = cfg.range_max - std::max(0.0, travel);
    if (lo > hi) {
      throw ConfigError("placement bounds cannot contain a trajectory with range-rate " +
                        std::to_string(rate) + " m/s over " + std::to_string(duration) + " s");
    }
    const double r0 = lo + (hi - lo) * unit(rng);
    const double len = cfg.radial_length_min +
                       (cfg.radial_length_max - cfg.radial_length_min) * unit(rng);
    init.emplace_back(r0, rate, 0.0);
    lengths.push_back(len);
  }
  return propagate_truth(cfg, init, lengths, seed);
}

}  // namespace camtt::scenario
