#pragma once

#include "camtt/core.hpp"
#include "camtt/fft.hpp"
#include "camtt/scenario/returns.hpp"

#include <bit>
#include <cmath>
#include <vector>

namespace camtt::scenario {

inline constexpr double kDbFloor = -300.0;

/// Range-Doppler power map in dB. Column c holds Doppler
/// (c - N/2 + 1) * prf / N, so the axis spans (-prf/2, prf/2].
struct RDMap {
  Grid<double> amplitude;  // dB, (range bin, Doppler bin)
  std::vector<double> range_axis;    // m, bin centres
  std::vector<double> doppler_axis;  // Hz
  double range_bin_size = 15.0;
  double doppler_bin_size = 1.0;
  int scan_index = 0;

  [[nodiscard]] std::size_t num_range_bins() const { return amplitude.rows(); }
  [[nodiscard]] std::size_t num_doppler_bins() const { return amplitude.cols(); }

  /// Nearest Doppler column for a frequency, wrapped into the axis.
  [[nodiscard]] std::size_t doppler_column(double doppler) const {
    const auto n = static_cast<long>(num_doppler_bins());
    long d = std::lround(doppler / doppler_bin_size);
    long c = d + n / 2 - 1;
    c = ((c % n) + n) % n;
    return static_cast<std::size_t>(c);
  }
  /// Nearest range bin, clamped to the grid.
  [[nodiscard]] std::size_t range_row(double range) const {
    const double x = (range - range_axis.front()) / range_bin_size;
    const long r = std::lround(x);
    return static_cast<std::size_t>(std::clamp<long>(r, 0, static_cast<long>(num_range_bins()) - 1));
  }
};

/// Column index in the Doppler-ordered map for FFT bin k of length n.
inline std::size_t doppler_column_of_fft_bin(std::size_t k, std::size_t n) {
  const long d = -signed_frequency_index(k, n);
  return static_cast<std::size_t>(d + static_cast<long>(n) / 2 - 1);
}

/// Per range bin, unitary rectangular-window DFT over the first `cpi_length`
/// pulses; power in dB clamped at the floor.
inline RDMap form_rd_map(const PulseMatrix& pulses, std::size_t cpi_length) {
  if (cpi_length == 0 || !std::has_single_bit(cpi_length)) throw SizeError("CPI length must be a power of two");
  if (cpi_length > pulses.num_pulses()) throw SizeError("CPI length exceeds the number of pulses");
  const std::size_t nb = pulses.num_range_bins();
  const std::size_t nd = cpi_length;

  RDMap map;
  map.amplitude = Grid<double>(nb, nd, kDbFloor);
  map.range_bin_size = pulses.range_bin_size;
  map.doppler_bin_size = pulses.prf / static_cast<double>(nd);
  map.scan_index = pulses.scan_index;
  map.range_axis.resize(nb);
  for (std::size_t m = 0; m < nb; ++m)
    map.range_axis[m] = pulses.range_offset + (static_cast<double>(m) + 0.5) * pulses.range_bin_size;
  map.doppler_axis.resize(nd);
  for (std::size_t c = 0; c < nd; ++c)
    map.doppler_axis[c] = (static_cast<double>(c) - static_cast<double>(nd) / 2.0 + 1.0) * map.doppler_bin_size;

  auto& dft = cached_dft(nd, UnitaryDft::Direction::forward);
  std::vector<Complex> out(nd);
  for (std::size_t m = 0; m < nb; ++m) {
    dft.transform(pulses.samples.row(m).first(nd), out);
    for (std::size_t k = 0; k < nd; ++k)
      map.amplitude(m, doppler_column_of_fft_bin(k, nd)) = power_to_db(std::norm(out[k]), kDbFloor);
  }
  return map;
}

}  // namespace camtt::scenario
