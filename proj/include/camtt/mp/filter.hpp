#pragma once

#include "camtt/core.hpp"
#include "camtt/motion.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace camtt::mp {

/// Gaussian belief over (range, range-rate, range-acceleration).
struct KinematicBelief {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Identity();
};

/// Bernoulli visibility belief.
struct VisibilityBelief {
  double p_visible = 0.5;
};

struct DetectionModelParams {
  double pd_visible = 0.9;
  double pd_invisible = 0.01;
  double pfa_prior = 1.0e-5;  // clutter likelihood density, per (m * Hz)

  void validate() const {
    require(pd_visible > 0.0 && pd_visible <= 1.0, "tracker.pd_visible must lie in (0,1]");
    require(pd_invisible > 0.0 && pd_invisible < pd_visible, "tracker.pd_invisible must lie in (0, pd_visible)");
    require(pfa_prior > 0.0, "tracker.pfa_prior must be > 0");
  }
};

/// Linear-Gaussian model shared by prediction, evaluation and update.
struct MotionModel {
  double scan_interval = 10.0;
  double sigma_accel = 1.0e-4;
  double wavelength = kSpeedOfLight / 9.0e9;
  double range_std = 15.0;   // m
  double doppler_std = 1.0;  // Hz

  [[nodiscard]] Mat3 transition() const { return ca_transition(scan_interval); }
  [[nodiscard]] Mat3 process_noise() const { return ca_process_noise(scan_interval, sigma_accel); }
  [[nodiscard]] Mat23 observation() const { return range_doppler_matrix(wavelength); }
  [[nodiscard]] Mat2 noise() const {
    Mat2 r = Mat2::Zero();
    r(0, 0) = range_std * range_std;
    r(1, 1) = doppler_std * doppler_std;
    return r;
  }

  void validate() const {
    require(scan_interval > 0.0, "tracker.scan_interval must be > 0");
    require(sigma_accel >= 0.0, "tracker.sigma_accel must be >= 0");
    require(wavelength > 0.0, "tracker.wavelength must be > 0");
    require(range_std > 0.0 && doppler_std > 0.0, "measurement noise must be positive (singular R)");
  }
};

inline KinematicBelief predict_kinematic(const KinematicBelief& prev, const Mat3& f, const Mat3& q) {
  KinematicBelief out;
  out.mean = f * prev.mean;
  out.cov = make_positive_definite(f * prev.cov * f.transpose() + q);
  return out;
}

inline KinematicBelief predict_kinematic(const KinematicBelief& prev, const MotionModel& model) {
  return predict_kinematic(prev, model.transition(), model.process_noise());
}

/// Two-state chain with P(stay) = `stay` on both states.
inline VisibilityBelief predict_visibility(const VisibilityBelief& prev, double stay = 0.85) {
  return {stay * prev.p_visible + (1.0 - stay) * (1.0 - prev.p_visible)};
}

/// General 2x2 row-stochastic transition, rows/cols ordered (invisible, visible).
inline VisibilityBelief predict_visibility(const VisibilityBelief& prev, const Mat2& t) {
  return {t(0, 1) * (1.0 - prev.p_visible) + t(1, 1) * prev.p_visible};
}

inline double gaussian_density(const Vec2& x, const Vec2& mean, const Mat2& cov) {
  const Vec2 d = x - mean;
  return std::exp(-0.5 * d.dot(cov.inverse() * d)) / (2.0 * kPi * std::sqrt(cov.determinant()));
}

inline double mahalanobis2(const Vec2& x, const Vec2& mean, const Mat2& cov) {
  const Vec2 d = x - mean;
  return d.dot(cov.inverse() * d);
}

/// Measurement evaluation grid, (N_T + 1) x (N_M + 1). Row 0 carries the
/// clutter likelihood per measurement; column 0 is unused (missed-detection
/// weights come from evaluate_visibility).
inline Grid<double> evaluate_measurements(std::span<const KinematicBelief> pred, std::span<const Vec2> meas,
                                          const MotionModel& model, const DetectionModelParams& params,
                                          double gate = 13.8) {
  model.validate();
  const Mat23 h = model.observation();
  const Mat2 r = model.noise();
  if (std::abs(r.determinant()) < 1e-300) throw ConfigError("measurement noise covariance is singular");
  const Mat2 r_inv = r.inverse();

  Grid<double> l(pred.size() + 1, meas.size() + 1, 0.0);
  for (std::size_t j = 0; j < meas.size(); ++j) l(0, j + 1) = params.pfa_prior;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Vec2 zhat = h * pred[i].mean;
    const Mat2 hph = h * pred[i].cov * h.transpose();
    const Mat2 s = hph + r;
    const double penalty = std::exp(-0.5 * (r_inv * hph).trace());
    for (std::size_t j = 0; j < meas.size(); ++j) {
      if (mahalanobis2(meas[j], zhat, s) > gate) continue;
      l(i + 1, j + 1) = gaussian_density(meas[j], zhat, r) * penalty;
    }
  }
  return l;
}

struct VisibilityWeights {
  double detected = 0.0;  // a_{i,0} = 0
  double missed = 1.0;    // a_{i,0} = 1
};

inline VisibilityWeights evaluate_visibility(const VisibilityBelief& vis, const DetectionModelParams& params) {
  const double p = vis.p_visible;
  return {params.pd_visible * p + params.pd_invisible * (1.0 - p),
          (1.0 - params.pd_visible) * p + (1.0 - params.pd_invisible) * (1.0 - p)};
}

/// Update with association weights `weights[j]` on measurements `meas[j]`.
/// Equivalent to the information-form sum over measurements; implemented as
/// a single KF correction with the weighted mean measurement and R / sum(w).
inline KinematicBelief update_kinematic(const KinematicBelief& pred, std::span<const Vec2> meas,
                                        std::span<const double> weights, const MotionModel& model) {
  if (meas.size() != weights.size()) throw SizeError("measurement and weight counts differ");
  double total = 0.0;
  Vec2 zsum = Vec2::Zero();
  for (std::size_t j = 0; j < meas.size(); ++j) {
    total += weights[j];
    zsum += weights[j] * meas[j];
  }
  if (total < 1e-12) return pred;

  const Mat23 h = model.observation();
  const Mat2 r = model.noise() / total;
  const Vec2 z = zsum / total;
  const Mat2 s = h * pred.cov * h.transpose() + r;
  const Eigen::Matrix<double, 3, 2> k = pred.cov * h.transpose() * s.inverse();
  const Mat3 a = Mat3::Identity() - k * h;

  KinematicBelief out;
  out.mean = pred.mean + k * (z - h * pred.mean);
  out.cov = make_positive_definite(a * pred.cov * a.transpose() + k * r * k.transpose());
  return out;
}

/// p(s) proportional to prior(s) * sum_a p(a | s) b(a), with a the
/// missed-detection indicator and `b_missed` = b(a_{i,0} = 1).
inline VisibilityBelief update_visibility(const VisibilityBelief& prior, double b_missed,
                                          const DetectionModelParams& params) {
  const double b_det = 1.0 - b_missed;
  const double vis = prior.p_visible * (params.pd_visible * b_det + (1.0 - params.pd_visible) * b_missed);
  const double inv =
      (1.0 - prior.p_visible) * (params.pd_invisible * b_det + (1.0 - params.pd_invisible) * b_missed);
  const double z = vis + inv;
  if (!(z > 0.0)) return prior;
  return {std::clamp(vis / z, 0.0, 1.0)};
}

/// Single-measurement track birth: range from the measurement, range-rate
/// from the Doppler, zero acceleration.
inline KinematicBelief two_point_init(const Vec2& z, const MotionModel& model, double velocity_inflation = 0.01,
                                      double accel_std = 1.0e-3) {
  KinematicBelief b;
  const double half = 0.5 * model.wavelength;
  b.mean = Vec3(z(0), -half * z(1), 0.0);
  b.cov = Mat3::Zero();
  b.cov(0, 0) = model.range_std * model.range_std;
  b.cov(1, 1) = half * half * model.doppler_std * model.doppler_std + velocity_inflation * velocity_inflation;
  b.cov(2, 2) = accel_std * accel_std;
  return b;
}

}  // namespace camtt::mp
