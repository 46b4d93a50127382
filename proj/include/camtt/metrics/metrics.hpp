#pragma once

#include "camtt/core.hpp"
#include "camtt/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace camtt::metrics {

/// Minimum-cost assignment for an n x m cost matrix (row-major). Returns,
/// per row, the assigned column or -1 when n > m leaves the row out.
inline std::vector<int> hungarian(const std::vector<double>& cost, std::size_t n, std::size_t m) {
  if (cost.size() != n * m) throw SizeError("cost matrix size mismatch");
  std::vector<int> result(n, -1);
  if (n == 0 || m == 0) return result;
  const bool transposed = n > m;
  const std::size_t rows = transposed ? m : n;
  const std::size_t cols = transposed ? n : m;
  const auto at = [&](std::size_t r, std::size_t c) { return transposed ? cost[c * m + r] : cost[r * m + c]; };

  // Potentials method, 1-based with a virtual column 0.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
        if (minv[j] < delta) { delta = minv[j]; j1 = j; }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] == 0) continue;
    if (transposed) result[j - 1] = static_cast<int>(p[j] - 1);
    else result[p[j] - 1] = static_cast<int>(j - 1);
  }
  return result;
}

inline Mat2 default_metric_covariance() {
  Mat2 c = Mat2::Zero();
  c(0, 0) = 15.0 * 15.0;
  c(1, 1) = 0.1 * 0.1;
  return c;
}

inline double mahalanobis(const Vec2& a, const Vec2& b, const Mat2& cov_inv) {
  const Vec2 d = a - b;
  return std::sqrt(std::max(0.0, d.dot(cov_inv * d)));
}

/// OSPA distance between two point sets in (range, Doppler).
inline double ospa(std::span<const Vec2> x, std::span<const Vec2> y, double c = 9.4, double p = 2.0,
                   const Mat2& cov = default_metric_covariance()) {
  require(c > 0.0 && p >= 1.0, "OSPA requires c > 0 and p >= 1");
  const std::size_t n = x.size(), m = y.size();
  if (n == 0 && m == 0) return 0.0;
  if (n == 0 || m == 0) return c;
  const Mat2 inv = cov.inverse();
  std::vector<double> cost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = std::pow(std::min(mahalanobis(x[i], y[j], inv), c), p);
  const auto a = hungarian(cost, n, m);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] >= 0) total += cost[i * m + static_cast<std::size_t>(a[i])];
  const std::size_t big = std::max(n, m), small = std::min(n, m);
  total += std::pow(c, p) * static_cast<double>(big - small);
  return std::pow(total / static_cast<double>(big), 1.0 / p);
}

struct Object {
  int id = 0;
  Vec3 state = Vec3::Zero();
};

/// Truth and estimates present at one scan.
struct Frame {
  std::vector<Object> truth;
  std::vector<Object> estimates;
};

inline Vec2 to_range_doppler(const Vec3& s, double wavelength) {
  return {s(0), doppler_from_range_rate(s(1), wavelength)};
}

struct MatchedPair {
  int scan = 0;
  int truth_id = 0;
  int estimate_id = 0;
  Vec3 truth;
  Vec3 estimate;
};

struct TrackScore {
  double amot = 1.0;
  int ids = 0;
  int frag = 0;
  int false_negatives = 0;
  int false_positives = 0;
  int truth_presences = 0;
  std::vector<MatchedPair> matches;
};

struct MatchSettings {
  double gate = 9.4;  // Mahalanobis
  double wavelength = kSpeedOfLight / 9.0e9;
  Mat2 cov = default_metric_covariance();
};

/// CLEAR-MOT style accounting: previous correspondences are kept while they
/// stay inside the gate, the rest is matched optimally. A switch is charged
/// when a truth is matched to an estimate other than its last match; a
/// fragment when a truth is matched again after an interruption.
inline TrackScore track_metrics(std::span<const Frame> frames, const MatchSettings& s = {}) {
  TrackScore out;
  const Mat2 inv = s.cov.inverse();
  std::map<int, int> last_match;   // truth id -> estimate id
  std::map<int, bool> was_matched; // truth id -> matched at previous presence
  std::map<int, bool> ever_matched;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    const std::size_t n = f.truth.size(), m = f.estimates.size();
    std::vector<Vec2> tz(n), ez(m);
    for (std::size_t i = 0; i < n; ++i) tz[i] = to_range_doppler(f.truth[i].state, s.wavelength);
    for (std::size_t j = 0; j < m; ++j) ez[j] = to_range_doppler(f.estimates[j].state, s.wavelength);

    std::vector<int> match(n, -1);
    std::vector<bool> used(m, false);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = last_match.find(f.truth[i].id);
      if (it == last_match.end()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!used[j] && f.estimates[j].id == it->second && mahalanobis(tz[i], ez[j], inv) <= s.gate) {
          match[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
    }
    std::vector<std::size_t> ri, cj;
    for (std::size_t i = 0; i < n; ++i)
      if (match[i] < 0) ri.push_back(i);
    for (std::size_t j = 0; j < m; ++j)
      if (!used[j]) cj.push_back(j);
    if (!ri.empty() && !cj.empty()) {
      const double big = 1e6;
      std::vector<double> cost(ri.size() * cj.size());
      for (std::size_t a = 0; a < ri.size(); ++a)
        for (std::size_t b = 0; b < cj.size(); ++b) {
          const double d = mahalanobis(tz[ri[a]], ez[cj[b]], inv);
          cost[a * cj.size() + b] = d <= s.gate ? d : big;
        }
      const auto asg = hungarian(cost, ri.size(), cj.size());
      for (std::size_t a = 0; a < ri.size(); ++a) {
        if (asg[a] < 0) continue;
        const auto b = static_cast<std::size_t>(asg[a]);
        if (cost[a * cj.size() + b] >= big) continue;
        match[ri[a]] = static_cast<int>(cj[b]);
        used[cj[b]] = true;
      }
    }

    out.truth_presences += static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int tid = f.truth[i].id;
      if (match[i] < 0) {
        ++out.false_negatives;
        if (ever_matched[tid]) was_matched[tid] = false;
        continue;
      }
      const auto& e = f.estimates[static_cast<std::size_t>(match[i])];
      auto it = last_match.find(tid);
      if (it != last_match.end() && it->second != e.id) ++out.ids;
      if (ever_matched[tid] && !was_matched[tid]) ++out.frag;
      last_match[tid] = e.id;
      ever_matched[tid] = true;
      was_matched[tid] = true;
      out.matches.push_back({static_cast<int>(k), tid, e.id, f.truth[i].state, e.state});
    }
    for (std::size_t j = 0; j < m; ++j)
      if (!used[j]) ++out.false_positives;
  }
  const int errors = out.false_negatives + out.false_positives + out.ids;
  if (out.truth_presences > 0)
    out.amot = 1.0 - static_cast<double>(errors) / static_cast<double>(out.truth_presences);
  else
    out.amot = errors == 0 ? 1.0 : -static_cast<double>(errors);
  return out;
}

struct Rmse {
  double position = 0.0;  // m
  double velocity = 0.0;  // m/s
};

inline std::optional<Rmse> rmse(std::span<const MatchedPair> matches) {
  if (matches.empty()) return std::nullopt;
  double sp = 0.0, sv = 0.0;
  for (const auto& m : matches) {
    const double dp = m.truth(0) - m.estimate(0);
    const double dv = m.truth(1) - m.estimate(1);
    sp += dp * dp;
    sv += dv * dv;
  }
  const auto n = static_cast<double>(matches.size());
  return Rmse{std::sqrt(sp / n), std::sqrt(sv / n)};
}

struct MetricReport {
  double amot = 1.0;
  int ids = 0;
  int frag = 0;
  int false_negatives = 0;
  int false_positives = 0;
  int truth_presences = 0;
  std::optional<double> rmse_position;  // m
  std::optional<double> rmse_velocity;  // m/s
  double mospa = 0.0;
  std::vector<double> ospa_per_scan;
  std::vector<std::optional<double>> rmse_position_per_scan;
  std::vector<std::optional<double>> rmse_velocity_per_scan;
};

inline MetricReport evaluate(std::span<const Frame> frames, const MatchSettings& s = {}, double c = 9.4,
                             double p = 2.0) {
  MetricReport r;
  const auto score = track_metrics(frames, s);
  r.amot = score.amot;
  r.ids = score.ids;
  r.frag = score.frag;
  r.false_negatives = score.false_negatives;
  r.false_positives = score.false_positives;
  r.truth_presences = score.truth_presences;
  if (auto e = rmse(score.matches)) {
    r.rmse_position = e->position;
    r.rmse_velocity = e->velocity;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::vector<Vec2> x, y;
    for (const auto& t : frames[k].truth) x.push_back(to_range_doppler(t.state, s.wavelength));
    for (const auto& e : frames[k].estimates) y.push_back(to_range_doppler(e.state, s.wavelength));
    const double d = ospa(x, y, c, p, s.cov);
    r.ospa_per_scan.push_back(d);
    sum += d;

    std::vector<MatchedPair> at;
    for (const auto& mp : score.matches)
      if (mp.scan == static_cast<int>(k)) at.push_back(mp);
    const auto e = rmse(at);
    r.rmse_position_per_scan.push_back(e ? std::optional(e->position) : std::nullopt);
    r.rmse_velocity_per_scan.push_back(e ? std::optional(e->velocity) : std::nullopt);
  }
  r.mospa = frames.empty() ? 0.0 : sum / static_cast<double>(frames.size());
  return r;
}

}  // namespace camtt::metrics
