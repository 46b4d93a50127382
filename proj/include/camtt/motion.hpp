#pragma once

#include "camtt/core.hpp"

namespace camtt {

/// Constant-acceleration transition over an interval `dt` for the state
/// (range, range-rate, range-acceleration).
inline Mat3 ca_transition(double dt) {
  Mat3 f;
  f << 1.0, dt, 0.5 * dt * dt,
       0.0, 1.0, dt,
       0.0, 0.0, 1.0;
  return f;
}

/// Process noise of a white-jerk driven constant-acceleration model.
inline Mat3 ca_process_noise(double dt, double sigma_accel) {
  const double dt2 = dt * dt, dt3 = dt2 * dt, dt4 = dt3 * dt, dt5 = dt4 * dt;
  Mat3 q;
  q << dt5 / 20.0, dt4 / 8.0, dt3 / 6.0,
       dt4 / 8.0,  dt3 / 3.0, dt2 / 2.0,
       dt3 / 6.0,  dt2 / 2.0, dt;
  return sigma_accel * sigma_accel * q;
}

/// Maps (range, range-rate, accel) to (range, Doppler).
inline Mat23 range_doppler_matrix(double wavelength) {
  Mat23 h;
  h << 1.0, 0.0, 0.0,
       0.0, -2.0 / wavelength, 0.0;
  return h;
}

inline double doppler_from_range_rate(double range_rate, double wavelength) {
  return -2.0 * range_rate / wavelength;
}

inline double range_rate_from_doppler(double doppler, double wavelength) {
  return -0.5 * wavelength * doppler;
}

inline double wavelength_from_carrier(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

}  // namespace camtt
