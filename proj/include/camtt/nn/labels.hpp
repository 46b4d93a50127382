#pragma once

#include "camtt/core.hpp"
#include "camtt/motion.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace camtt::nn {

struct LabelRule {
  double t_dist = 9.4;
  double range_scale = 15.0;   // m
  double doppler_scale = 0.1;  // Hz
  double wavelength = kSpeedOfLight / 9.0e9;
};

/// Normalized Euclidean distance from a measurement to the nearest truth.
inline double nearest_truth_distance(const Vec2& z, std::span<const Vec3> truth, const LabelRule& rule) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : truth) {
    const double dr = (z(0) - x(0)) / rule.range_scale;
    const double dd = (z(1) - doppler_from_range_rate(x(1), rule.wavelength)) / rule.doppler_scale;
    best = std::min(best, std::sqrt(dr * dr + dd * dd));
  }
  return best;
}

/// 1 when some truth lies within t_dist (boundary included), else 0.
inline std::vector<int> label_measurements(std::span<const Vec2> meas, std::span<const Vec3> truth,
                                           const LabelRule& rule) {
  std::vector<int> out;
  out.reserve(meas.size());
  for (const auto& z : meas) out.push_back(nearest_truth_distance(z, truth, rule) <= rule.t_dist ? 1 : 0);
  return out;
}

}  // namespace camtt::nn
