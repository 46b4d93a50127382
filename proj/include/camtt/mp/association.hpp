#pragma once

#include "camtt/core.hpp"
#include "camtt/mp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace camtt::mp {

/// Marginal association probabilities, (N_T + 1) x (N_M + 1).
/// Entry (i, 0), i >= 1: target i missed. Entry (0, j), j >= 1: measurement j
/// is clutter. Entry (0, 0) is unused.
struct AssociationBeliefs {
  Grid<double> marginals;
  bool converged = true;
  int iterations = 0;

  [[nodiscard]] std::size_t num_targets() const { return marginals.rows() == 0 ? 0 : marginals.rows() - 1; }
  [[nodiscard]] std::size_t num_measurements() const { return marginals.cols() == 0 ? 0 : marginals.cols() - 1; }
  [[nodiscard]] double missed(std::size_t i) const { return marginals(i + 1, 0); }
  [[nodiscard]] double clutter(std::size_t j) const { return marginals(0, j + 1); }
  [[nodiscard]] double assoc(std::size_t i, std::size_t j) const { return marginals(i + 1, j + 1); }
};

struct BpConfig {
  double tolerance = 1e-6;
  int max_iterations = 1000;
};

/// Loopy BP over the bipartite target/measurement association graph.
///
/// Target i weighs "missed" by missed_i and measurement j by detected_i *
/// L(i, j); measurement j weighs "clutter" by clutter[j]. Messages:
///   mu(i->j) = beta_ij / (beta_i0 + sum_{j' != j} beta_ij' nu(j'->i))
///   nu(j->i) = 1 / (clutter_j + sum_{i' != i} mu(i'->j))
inline AssociationBeliefs bp_data_association(const Grid<double>& likelihood,
                                              std::span<const VisibilityWeights> visibility,
                                              std::span<const double> clutter, const BpConfig& cfg = {}) {
  const std::size_t nt = visibility.size();
  const std::size_t nm = clutter.size();
  if (likelihood.rows() != nt + 1 || likelihood.cols() != nm + 1)
    throw SizeError("likelihood grid does not match target/measurement counts");
  for (double c : clutter)
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("clutter messages must be strictly positive");

  AssociationBeliefs out;
  out.marginals = Grid<double>(nt + 1, nm + 1, 0.0);
  for (std::size_t i = 1; i <= nt; ++i) out.marginals(i, 0) = 1.0;
  for (std::size_t j = 1; j <= nm; ++j) out.marginals(0, j) = 1.0;
  if (nt == 0 || nm == 0) return out;

  Grid<double> beta(nt, nm);
  std::vector<double> beta0(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    beta0[i] = std::max(visibility[i].missed, 1e-300);
    for (std::size_t j = 0; j < nm; ++j) beta(i, j) = visibility[i].detected * likelihood(i + 1, j + 1);
  }

  Grid<double> mu(nt, nm, 0.0), nu(nt, nm, 1.0);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nm; ++j) nu(i, j) = 1.0 / clutter[j];

  std::vector<double> row(nt), col(nm);
  out.converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    // Target-to-measurement.
    for (std::size_t i = 0; i < nt; ++i) {
      double s = beta0[i];
      for (std::size_t j = 0; j < nm; ++j) s += beta(i, j) * nu(i, j);
      for (std::size_t j = 0; j < nm; ++j) {
        const double denom = s - beta(i, j) * nu(i, j);
        mu(i, j) = beta(i, j) / std::max(denom, 1e-300);
      }
    }
    // Measurement-to-target.
    double change = 0.0;
    for (std::size_t j = 0; j < nm; ++j) {
      double s = clutter[j];
      for (std::size_t i = 0; i < nt; ++i) s += mu(i, j);
      for (std::size_t i = 0; i < nt; ++i) {
        const double v = 1.0 / (s - mu(i, j));
        const double scale = std::max(std::abs(v), std::abs(nu(i, j)));
        if (scale > 0.0) change = std::max(change, std::abs(v - nu(i, j)) / scale);
        nu(i, j) = v;
      }
    }
    out.iterations = it;
    if (change < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }

  // Rows from beta * nu, clutter entries from the final mu.
  for (std::size_t i = 0; i < nt; ++i) {
    double s = beta0[i];
    for (std::size_t j = 0; j < nm; ++j) s += beta(i, j) * nu(i, j);
    out.marginals(i + 1, 0) = beta0[i] / s;
    for (std::size_t j = 0; j < nm; ++j) out.marginals(i + 1, j + 1) = beta(i, j) * nu(i, j) / s;
  }
  for (std::size_t j = 0; j < nm; ++j) {
    double s = clutter[j];
    for (std::size_t i = 0; i < nt; ++i) s += mu(i, j);
    out.marginals(0, j + 1) = clutter[j] / s;
  }
  return out;
}

/// One-pass clutter belief before any BP iteration:
/// clutter_j / (clutter_j + sum_i beta_ij / beta_i0).
inline std::vector<double> prior_clutter_beliefs(const Grid<double>& likelihood,
                                                 std::span<const VisibilityWeights> visibility,
                                                 std::span<const double> clutter) {
  const std::size_t nt = visibility.size();
  const std::size_t nm = clutter.size();
  if (likelihood.rows() != nt + 1 || likelihood.cols() != nm + 1)
    throw SizeError("likelihood grid does not match target/measurement counts");
  std::vector<double> b(nm, 1.0);
  for (std::size_t j = 0; j < nm; ++j) {
    double s = clutter[j];
    for (std::size_t i = 0; i < nt; ++i)
      s += visibility[i].detected * likelihood(i + 1, j + 1) / std::max(visibility[i].missed, 1e-300);
    b[j] = clutter[j] / s;
  }
  return b;
}

}  // namespace camtt::mp
