#include "camtt/ds/evidence.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace camtt;
using namespace camtt::ds;

TEST(Evidence, WorkedExample) {
  const auto m = ds_combine(bba_from_probability(0.6), bba_from_probability(0.8));
  EXPECT_NEAR(m.target, 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(m.clutter, 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(pignistic(m), 6.0 / 7.0, 1e-12);
}

TEST(Evidence, ConflictReported) {
  const auto r = ds_combine_checked(bba_from_probability(0.6), bba_from_probability(0.8));
  EXPECT_NEAR(r.conflict, 0.6 * 0.2 + 0.4 * 0.8, 1e-15);
  EXPECT_FALSE(r.clamped);
}

TEST(Evidence, VacuousIsNeutral) {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto m = oracle::random_bba(rng);
    const auto r = ds_combine(m, BBA{});
    EXPECT_NEAR(r.clutter, m.clutter, 1e-15);
    EXPECT_NEAR(r.target, m.target, 1e-15);
    EXPECT_NEAR(r.omega, m.omega, 1e-15);
  }
}

TEST(Evidence, CommutativeAssociativeNormalized) {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const auto a = oracle::random_bba(rng), b = oracle::random_bba(rng), c = oracle::random_bba(rng);
    const auto ab = ds_combine(a, b), ba = ds_combine(b, a);
    EXPECT_EQ(ab.clutter, ba.clutter);
    EXPECT_EQ(ab.target, ba.target);
    EXPECT_EQ(ab.omega, ba.omega);
    const auto l = ds_combine(ab, c), r = ds_combine(a, ds_combine(b, c));
    EXPECT_NEAR(l.clutter, r.clutter, 1e-12);
    EXPECT_NEAR(l.target, r.target, 1e-12);
    EXPECT_NEAR(l.omega, r.omega, 1e-12);
    EXPECT_TRUE(l.valid(1e-12));
    EXPECT_NEAR(pignistic(l) + pignistic_clutter(l), 1.0, 1e-12);
  }
}

TEST(Evidence, BayesianInputsGiveBayesianProduct) {
  // For Bayesian masses the rule reduces to p q / (p q + (1-p)(1-q)).
  for (double p : {0.1, 0.3, 0.5, 0.77})
    for (double q : {0.05, 0.5, 0.9}) {
      const auto m = ds_combine(bba_from_probability(p), bba_from_probability(q));
      EXPECT_NEAR(m.target, p * q / (p * q + (1 - p) * (1 - q)), 1e-14);
      EXPECT_EQ(m.omega, 0.0);
    }
}

TEST(Evidence, HalfIsNeutralForBayesian) {
  for (double p : {0.0, 0.2, 0.999, 1.0}) {
    const auto m = ds_combine(bba_from_probability(p), bba_from_probability(0.5));
    EXPECT_NEAR(pignistic(m), p, 1e-15);
  }
}

TEST(Evidence, TotalConflictIsClamped) {
  const auto r = ds_combine_checked(bba_from_probability(1.0), bba_from_probability(0.0));
  EXPECT_TRUE(r.clamped);
  EXPECT_TRUE(std::isfinite(r.mass.target));
  EXPECT_NEAR(r.mass.target + r.mass.clutter + r.mass.omega, 1.0, 1e-12);
  EXPECT_NEAR(r.mass.target, 0.5, 1e-6);
}

TEST(Evidence, ProbabilityOutOfRangeThrows) {
  EXPECT_THROW(bba_from_probability(1.5), ConfigError);
  EXPECT_THROW(bba_from_probability(-0.1), ConfigError);
}
