#pragma once

#include "camtt/core.hpp"

#include <algorithm>
#include <cmath>

namespace camtt::ds {

/// Mass function over the power set of {clutter, target}.
struct BBA {
  double empty = 0.0;
  double clutter = 0.0;  // {h-bar}
  double target = 0.0;   // {h}
  double omega = 1.0;    // {h-bar, h}

  [[nodiscard]] double total() const { return empty + clutter + target + omega; }
  [[nodiscard]] bool valid(double tol = 1e-12) const {
    return empty == 0.0 && clutter >= 0.0 && target >= 0.0 && omega >= 0.0 && std::abs(total() - 1.0) <= tol;
  }
};

/// Simple Bayesian BBA: m(h) = p, m(h-bar) = 1 - p.
inline BBA bba_from_probability(double p_target) {
  require(p_target >= 0.0 && p_target <= 1.0, "BBA probability must lie in [0,1]");
  return {0.0, 1.0 - p_target, p_target, 0.0};
}

struct Combination {
  BBA mass;
  double conflict = 0.0;
  bool clamped = false;
};

namespace detail {

/// Unnormalized conjunctive products. Each focal set gathers symmetric
/// pairs so that swapping the operands leaves every sum bit-identical.
inline void conjunctive(const BBA& a, const BBA& b, double& c, double& t, double& o, double& k) {
  c = a.clutter * b.clutter + (a.clutter * b.omega + a.omega * b.clutter);
  t = a.target * b.target + (a.target * b.omega + a.omega * b.target);
  o = a.omega * b.omega;
  k = a.clutter * b.target + a.target * b.clutter;
}

inline BBA clamp_bayesian(const BBA& m, double eps) {
  BBA r = m;
  r.clutter = std::clamp(m.clutter, eps, 1.0 - eps);
  r.target = std::clamp(m.target, eps, 1.0 - eps);
  const double s = r.clutter + r.target + r.omega;
  r.clutter /= s;
  r.target /= s;
  r.omega /= s;
  return r;
}

}  // namespace detail

/// Dempster's rule. Under total conflict the singleton masses of both
/// inputs are clamped to [eps, 1 - eps] and the result is flagged.
inline Combination ds_combine_checked(const BBA& m1, const BBA& m2, double eps = 1e-9) {
  Combination out;
  double c, t, o, k;
  detail::conjunctive(m1, m2, c, t, o, k);
  if (k >= 1.0 - 1e-12) {
    out.clamped = true;
    detail::conjunctive(detail::clamp_bayesian(m1, eps), detail::clamp_bayesian(m2, eps), c, t, o, k);
  }
  out.conflict = k;
  const double norm = c + t + o;
  out.mass = {0.0, c / norm, t / norm, o / norm};
  return out;
}

inline BBA ds_combine(const BBA& m1, const BBA& m2) { return ds_combine_checked(m1, m2).mass; }

/// BetP(h) = m(h) + m(Omega) / 2.
inline double pignistic(const BBA& m) { return m.target + 0.5 * m.omega; }

/// BetP of the clutter hypothesis.
inline double pignistic_clutter(const BBA& m) { return m.clutter + 0.5 * m.omega; }

}  // namespace camtt::ds
