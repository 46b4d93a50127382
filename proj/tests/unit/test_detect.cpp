#include "camtt/detect/detector.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace camtt;
using namespace camtt::detect;

namespace {

PrimitiveDetection at(const scenario::RDMap& m, std::size_t r, std::size_t d) { return {r, d, m.amplitude(r, d)}; }

}  // namespace

TEST(Cfar, FalseAlarmRateOnExponentialNoise) {
  auto map = fixtures::exponential_noise_map(200, 512, 99);
  DetectorConfig cfg;
  cfg.pfa = 0.28;
  const auto dets = cfar_detect(map, cfg);
  const double rate = static_cast<double>(dets.size()) / static_cast<double>(map.amplitude.size());
  EXPECT_GE(rate, 0.25);
  EXPECT_LE(rate, 0.31);
}

TEST(Cfar, StrongCellDetected) {
  auto map = fixtures::exponential_noise_map(64, 128, 5);
  map.amplitude(30, 40) = 60.0;
  DetectorConfig cfg;
  const auto dets = cfar_detect(map, cfg);
  bool found = false;
  for (const auto& d : dets) found |= d.range_bin == 30 && d.doppler_bin == 40;
  EXPECT_TRUE(found);
}

TEST(Cfar, FlatMapHasNoDetections) {
  auto map = fixtures::make_map(64, 128, -10.0);
  DetectorConfig cfg;
  cfg.pfa = 0.28;
  EXPECT_TRUE(cfar_detect(map, cfg).empty());
}

TEST(Cfar, WindowLargerThanMapIsConfigError) {
  auto map = fixtures::make_map(8, 16);
  EXPECT_THROW(cfar_detect(map, DetectorConfig{}), ConfigError);
}

TEST(Cfar, MultiplierMatchesClosedForm) {
  // For N exponential cells P(X > a * mean) = (1 + a / N)^-N.
  for (std::size_t n : {8u, 40u, 64u})
    for (double pfa : {0.28, 1e-2, 1e-4}) {
      const double a = ca_cfar_multiplier(pfa, n);
      EXPECT_NEAR(std::pow(1.0 + a / static_cast<double>(n), -static_cast<double>(n)), pfa, 1e-12 * (1 + pfa));
    }
}

TEST(Cfar, SmallerPfaGivesSubset) {
  auto map = fixtures::exponential_noise_map(64, 256, 17);
  DetectorConfig lo, hi;
  lo.pfa = 0.01;
  hi.pfa = 0.1;
  std::set<std::pair<std::size_t, std::size_t>> big;
  for (const auto& d : cfar_detect(map, hi)) big.emplace(d.range_bin, d.doppler_bin);
  const auto small = cfar_detect(map, lo);
  EXPECT_LT(small.size(), big.size());
  for (const auto& d : small) EXPECT_TRUE(big.count(std::pair(d.range_bin, d.doppler_bin)));
}

TEST(Cluster, SingleDenseBlob) {
  auto map = fixtures::make_map(40, 64);
  DetectorConfig cfg;
  std::vector<PrimitiveDetection> d;
  for (std::size_t k = 0; k < 5; ++k) d.push_back(at(map, 10 + k % 2, 20 + k / 2));
  const auto c = cluster(d, map, cfg);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].size(), 5u);
}

TEST(Cluster, BelowMinPointsIsNoise) {
  auto map = fixtures::make_map(40, 64);
  DetectorConfig cfg;
  std::vector<PrimitiveDetection> d(4, at(map, 10, 20));
  EXPECT_TRUE(cluster(d, map, cfg).empty());
}

// Ten points traced by hand: two 5-point blobs four range bins apart.
TEST(Cluster, TwoSeparatedBlobs) {
  auto map = fixtures::make_map(60, 64, 0.0, 15.0, 1.0);
  DetectorConfig cfg;
  cfg.r_th = 15.0;
  cfg.d_th = 1.0;
  std::vector<PrimitiveDetection> d;
  for (std::size_t k = 0; k < 5; ++k) d.push_back(at(map, 10, 30 + k % 2));
  for (std::size_t k = 0; k < 5; ++k) d.push_back(at(map, 14, 30 + k % 2));  // 60 m = 4 r_th away
  const auto c = cluster(d, map, cfg);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].size(), 5u);
  EXPECT_EQ(c[1].size(), 5u);
  EXPECT_EQ(c[0][0].range_bin, 10u);
  EXPECT_EQ(c[1][0].range_bin, 14u);
}

TEST(Cluster, BorderPointsJoinAndChainsMerge) {
  auto map = fixtures::make_map(60, 64, 0.0, 15.0, 1.0);
  DetectorConfig cfg;
  cfg.r_th = 15.0;
  cfg.d_th = 1.0;
  cfg.min_cluster_size = 3;
  // A chain along Doppler: every interior point has 3 neighbours (itself included).
  std::vector<PrimitiveDetection> d;
  for (std::size_t k = 0; k < 6; ++k) d.push_back(at(map, 20, 10 + k));
  // Isolated point.
  d.push_back(at(map, 40, 50));
  const auto c = cluster(d, map, cfg);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].size(), 6u);
}

TEST(Extract, SinglePrimitiveCentroid) {
  auto map = fixtures::make_map(40, 512, -20.0);
  DetectorConfig cfg;
  const std::size_t col = map.doppler_column(0.0);
  map.amplitude(10, col) = 10.0;
  const auto m = extract_measurement({at(map, 10, col)}, map, cfg);
  EXPECT_DOUBLE_EQ(m.range, map.range_axis[10]);
  EXPECT_DOUBLE_EQ(m.doppler, 0.0);
  EXPECT_EQ(m.n_primitives, 1);
}

TEST(Extract, SymmetricCentroids) {
  auto map = fixtures::make_map(40, 512, 0.0);
  // Axis with bins at 0, 15, 30, ... and arbitrary spots at 100 and 200.
  for (std::size_t r = 0; r < 40; ++r) map.range_axis[r] = 15.0 * static_cast<double>(r);
  map.range_axis[7] = 100.0;
  map.range_axis[13] = 200.0;
  DetectorConfig cfg;
  auto m = extract_measurement({at(map, 7, 100), at(map, 13, 100)}, map, cfg);
  EXPECT_NEAR(m.range, 150.0, 1e-12);

  map.amplitude(0, 5) = 0.0;
  map.amplitude(1, 5) = 20.0 * std::log10(2.0);
  map.amplitude(2, 5) = 0.0;
  m = extract_measurement({at(map, 0, 5), at(map, 1, 5), at(map, 2, 5)}, map, cfg);
  EXPECT_NEAR(m.range, 15.0, 1e-12);
}

TEST(Extract, PatchStretchedAndCentred) {
  auto map = fixtures::exponential_noise_map(40, 512, 8);
  DetectorConfig cfg;
  map.amplitude(20, 300) = 40.0;
  const auto m = extract_measurement({at(map, 20, 300)}, map, cfg);
  ASSERT_EQ(m.rd_patch.rows(), 5u);
  ASSERT_EQ(m.rd_patch.cols(), 512u);
  EXPECT_FALSE(m.edge_padded);
  double lo = 1e9, hi = -1e9;
  for (double v : m.rd_patch.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_DOUBLE_EQ(lo, 0.0);
  EXPECT_DOUBLE_EQ(hi, 255.0);
  // The peak sits in the centre row and centre column.
  EXPECT_DOUBLE_EQ(m.rd_patch(2, 256), 255.0);
}

TEST(Extract, EdgePatchIsPaddedAndFlagged) {
  auto map = fixtures::exponential_noise_map(40, 512, 9);
  DetectorConfig cfg;
  const auto m = extract_measurement({at(map, 0, 10)}, map, cfg);
  EXPECT_TRUE(m.edge_padded);
  for (std::size_t c = 0; c < 512; ++c) {
    EXPECT_EQ(m.rd_patch(0, c), 0.0);
    EXPECT_EQ(m.rd_patch(1, c), 0.0);
  }
}

TEST(Extract, EmptyClusterThrows) {
  auto map = fixtures::make_map(40, 512);
  EXPECT_THROW(extract_measurement({}, map, DetectorConfig{}), ConfigError);
}

TEST(Extract, CentroidInsideBoundingBox) {
  auto map = fixtures::exponential_noise_map(96, 512, 21);
  DetectorConfig cfg;
  cfg.pfa = 0.2;
  const auto dets = cfar_detect(map, cfg);
  const auto clusters = cluster(dets, map, cfg);
  ASSERT_FALSE(clusters.empty());
  for (const auto& c : clusters) {
    double rlo = 1e18, rhi = -1e18, dlo = 1e18, dhi = -1e18;
    for (const auto& p : c) {
      rlo = std::min(rlo, map.range_axis[p.range_bin]);
      rhi = std::max(rhi, map.range_axis[p.range_bin]);
      dlo = std::min(dlo, map.doppler_axis[p.doppler_bin]);
      dhi = std::max(dhi, map.doppler_axis[p.doppler_bin]);
    }
    const auto m = extract_measurement(c, map, cfg);
    EXPECT_GE(m.range, rlo - 1e-9);
    EXPECT_LE(m.range, rhi + 1e-9);
    EXPECT_GE(m.doppler, dlo - 1e-9);
    EXPECT_LE(m.doppler, dhi + 1e-9);
    EXPECT_GE(m.n_primitives, cfg.min_cluster_size);
  }
}
