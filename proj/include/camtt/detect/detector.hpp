#pragma once

#include "camtt/core.hpp"
#include "camtt/scenario/rd_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace camtt::detect {

using scenario::RDMap;

struct PrimitiveDetection {
  std::size_t range_bin = 0;
  std::size_t doppler_bin = 0;
  double amplitude = 0.0;  // dB
};

struct DetectorConfig {
  double pfa = 0.02;
  int guard_cells = 4;      // per side, per dimension
  int training_cells = 16;  // per side, per dimension
  double r_th = 45.0;       // m
  double d_th = 4.0;        // Hz
  int min_cluster_size = 5;
  int patch_range_bins = 5;
  int patch_doppler_bins = 512;

  void validate() const {
    require(pfa > 0.0 && pfa < 1.0, "detector.pfa must lie in (0,1)");
    require(guard_cells >= 0, "detector.guard_cells must be >= 0");
    require(training_cells >= 1, "detector.training_cells must be >= 1");
    require(r_th > 0.0 && d_th > 0.0, "detector clustering thresholds must be positive");
    require(min_cluster_size >= 1, "detector.min_cluster_size must be >= 1");
    require(patch_range_bins >= 1 && patch_range_bins % 2 == 1, "detector.patch_range_bins must be odd");
    require(patch_doppler_bins >= 1, "detector.patch_doppler_bins must be >= 1");
  }
};

/// CA-CFAR threshold multiplier for N exponential training cells.
inline double ca_cfar_multiplier(double pfa, std::size_t n_training) {
  const double n = static_cast<double>(n_training);
  return n * (std::pow(pfa, -1.0 / n) - 1.0);
}

/// Cell-averaging CFAR over a cross-shaped window in the linear power domain.
/// The Doppler arm wraps around; range-arm cells beyond the map edge are
/// skipped and the multiplier uses the actual training count.
inline std::vector<PrimitiveDetection> cfar_detect(const RDMap& map, const DetectorConfig& cfg) {
  cfg.validate();
  const std::size_t nr = map.num_range_bins();
  const std::size_t nd = map.num_doppler_bins();
  const int g = cfg.guard_cells, t = cfg.training_cells;
  if (nd < static_cast<std::size_t>(2 * (g + t) + 1) || nr < static_cast<std::size_t>(g + t + 1))
    throw ConfigError("RD map is smaller than the CFAR window");

  Grid<double> power(nr, nd);
  for (std::size_t i = 0; i < power.size(); ++i)
    power.values()[i] = map.amplitude.values()[i] <= scenario::kDbFloor ? 0.0 : db_to_power(map.amplitude.values()[i]);

  // Multipliers only depend on how many range-arm cells fit.
  std::map<std::size_t, double> alpha;
  const auto mult = [&](std::size_t n) {
    auto it = alpha.find(n);
    if (it == alpha.end()) it = alpha.emplace(n, ca_cfar_multiplier(cfg.pfa, n)).first;
    return it->second;
  };

  std::vector<PrimitiveDetection> out;
  const auto ind = static_cast<long>(nd);
  for (std::size_t r = 0; r < nr; ++r) {
    // Range arm sums per Doppler column share the row loop.
    for (std::size_t d = 0; d < nd; ++d) {
      double sum = 0.0;
      std::size_t n = 0;
      for (int o = g + 1; o <= g + t; ++o) {
        sum += power(r, static_cast<std::size_t>(((static_cast<long>(d) + o) % ind + ind) % ind));
        sum += power(r, static_cast<std::size_t>(((static_cast<long>(d) - o) % ind + ind) % ind));
        n += 2;
        const long up = static_cast<long>(r) + o, down = static_cast<long>(r) - o;
        if (up < static_cast<long>(nr)) { sum += power(static_cast<std::size_t>(up), d); ++n; }
        if (down >= 0) { sum += power(static_cast<std::size_t>(down), d); ++n; }
      }
      const double threshold = mult(n) * sum / static_cast<double>(n);
      if (power(r, d) > threshold) out.push_back({r, d, map.amplitude(r, d)});
    }
  }
  return out;
}

/// DBSCAN with the box neighbourhood max(|dr|/r_th, |dd|/d_th) <= 1 over the
/// detections' physical coordinates. Noise points are dropped. Clusters are
/// ordered by their first member in (range, Doppler) order.
inline std::vector<std::vector<PrimitiveDetection>> cluster(const std::vector<PrimitiveDetection>& dets,
                                                            const RDMap& map, const DetectorConfig& cfg) {
  cfg.validate();
  std::vector<PrimitiveDetection> pts = dets;
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return std::pair(a.range_bin, a.doppler_bin) < std::pair(b.range_bin, b.doppler_bin);
  });
  const std::size_t n = pts.size();
  std::vector<double> xr(n), xd(n);
  for (std::size_t i = 0; i < n; ++i) {
    xr[i] = map.range_axis.at(pts[i].range_bin);
    xd[i] = map.doppler_axis.at(pts[i].doppler_bin);
  }

  // Bucket grid with cell size equal to the thresholds.
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  const auto key = [&](std::size_t i) {
    return std::pair(static_cast<long>(std::floor(xr[i] / cfg.r_th)), static_cast<long>(std::floor(xd[i] / cfg.d_th)));
  };
  for (std::size_t i = 0; i < n; ++i) buckets[key(i)].push_back(i);

  const auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> nb;
    const auto [kr, kd] = key(i);
    for (long a = kr - 1; a <= kr + 1; ++a)
      for (long b = kd - 1; b <= kd + 1; ++b) {
        auto it = buckets.find({a, b});
        if (it == buckets.end()) continue;
        for (std::size_t j : it->second)
          if (std::max(std::abs(xr[i] - xr[j]) / cfg.r_th, std::abs(xd[i] - xd[j]) / cfg.d_th) <= 1.0 + 1e-12)
            nb.push_back(j);
      }
    std::sort(nb.begin(), nb.end());
    return nb;
  };

  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int next = 0;
  const auto min_pts = static_cast<std::size_t>(cfg.min_cluster_size);
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    auto nb = neighbours(i);
    if (nb.size() < min_pts) { label[i] = kNoise; continue; }
    const int c = next++;
    label[i] = c;
    std::vector<std::size_t> frontier(nb.begin(), nb.end());
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const std::size_t j = frontier[f];
      if (label[j] == kNoise) label[j] = c;
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto nj = neighbours(j);
      if (nj.size() >= min_pts) frontier.insert(frontier.end(), nj.begin(), nj.end());
    }
  }

  std::vector<std::vector<PrimitiveDetection>> clusters(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] >= 0) clusters[static_cast<std::size_t>(label[i])].push_back(pts[i]);
  return clusters;
}

struct Measurement {
  double range = 0.0;    // m
  double doppler = 0.0;  // Hz
  Grid<double> rd_patch; // patch_range_bins x patch_doppler_bins, stretched to [0,255]
  int n_primitives = 0;
  int scan_index = 0;
  bool edge_padded = false;

  [[nodiscard]] Vec2 position() const { return {range, doppler}; }
};

/// Stretches finite values linearly onto [0,255] keeping min and max.
inline void stretch_to_byte_range(Grid<double>& patch, const Grid<unsigned char>& valid) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < patch.size(); ++i)
    if (valid.values()[i]) { lo = std::min(lo, patch.values()[i]); hi = std::max(hi, patch.values()[i]); }
  for (std::size_t i = 0; i < patch.size(); ++i) {
    double& v = patch.values()[i];
    if (!valid.values()[i] || !(hi > lo)) v = 0.0;
    else v = 255.0 * (v - lo) / (hi - lo);
  }
}

/// Amplitude-weighted centroid plus the RD patch around it. The patch rows
/// are the range bins centred on the centroid bin (zero-padded past the map
/// edge); its columns are the Doppler bins circularly centred on the
/// centroid's Doppler bin.
inline Measurement extract_measurement(const std::vector<PrimitiveDetection>& cl, const RDMap& map,
                                       const DetectorConfig& cfg) {
  if (cl.empty()) throw ConfigError("cannot extract a measurement from an empty cluster");
  double wsum = 0.0, r = 0.0, d = 0.0;
  for (const auto& p : cl) {
    const double a = std::pow(10.0, p.amplitude / 20.0);
    wsum += a;
    r += a * map.range_axis.at(p.range_bin);
    d += a * map.doppler_axis.at(p.doppler_bin);
  }
  Measurement m;
  m.range = r / wsum;
  m.doppler = d / wsum;
  m.n_primitives = static_cast<int>(cl.size());
  m.scan_index = map.scan_index;

  const auto pr = static_cast<std::size_t>(cfg.patch_range_bins);
  const auto pd = static_cast<std::size_t>(cfg.patch_doppler_bins);
  const std::size_t nd = map.num_doppler_bins();
  if (pd > nd) throw SizeError("patch is wider than the Doppler axis");
  m.rd_patch = Grid<double>(pr, pd, 0.0);
  Grid<unsigned char> valid(pr, pd, 0);
  const long center_r = static_cast<long>(map.range_row(m.range));
  const long center_d = static_cast<long>(map.doppler_column(m.doppler));
  const long half_r = static_cast<long>(pr / 2);
  const long half_d = static_cast<long>(pd / 2);
  for (std::size_t i = 0; i < pr; ++i) {
    const long rr = center_r - half_r + static_cast<long>(i);
    if (rr < 0 || rr >= static_cast<long>(map.num_range_bins())) { m.edge_padded = true; continue; }
    for (std::size_t j = 0; j < pd; ++j) {
      const long dd = ((center_d - half_d + static_cast<long>(j)) % static_cast<long>(nd) + static_cast<long>(nd)) %
                      static_cast<long>(nd);
      m.rd_patch(i, j) = map.amplitude(static_cast<std::size_t>(rr), static_cast<std::size_t>(dd));
      valid(i, j) = 1;
    }
  }
  stretch_to_byte_range(m.rd_patch, valid);
  return m;
}

/// CFAR, clustering and measurement extraction for one map.
inline std::vector<Measurement> detect_measurements(const RDMap& map, const DetectorConfig& cfg) {
  auto dets = cfar_detect(map, cfg);
  auto clusters = cluster(dets, map, cfg);
  std::vector<Measurement> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(extract_measurement(c, map, cfg));
  return out;
}

}  // namespace camtt::detect
