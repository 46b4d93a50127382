#pragma once

#include "camtt/core.hpp"
#include "camtt/scenario/rd_map.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace camtt::fixtures {

/// RD map with bin-centred axes and a constant fill in dB.
inline scenario::RDMap make_map(std::size_t rows, std::size_t cols, double fill_db = 0.0,
                                double range_bin = 15.0, double doppler_bin = 1.0) {
  scenario::RDMap m;
  m.amplitude = Grid<double>(rows, cols, fill_db);
  m.range_bin_size = range_bin;
  m.doppler_bin_size = doppler_bin;
  m.range_axis.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) m.range_axis[r] = (static_cast<double>(r) + 0.5) * range_bin;
  m.doppler_axis.resize(cols);
  for (std::size_t c = 0; c < cols; ++c)
    m.doppler_axis[c] = (static_cast<double>(c) - static_cast<double>(cols) / 2.0 + 1.0) * doppler_bin;
  return m;
}

/// Exponentially distributed power (unit mean) in dB.
inline scenario::RDMap exponential_noise_map(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  auto m = make_map(rows, cols);
  Rng rng(seed);
  std::exponential_distribution<double> e(1.0);
  for (double& v : m.amplitude.values()) v = 10.0 * std::log10(e(rng));
  return m;
}

inline double relative_error(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace camtt::fixtures
