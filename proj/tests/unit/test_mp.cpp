#include "camtt/mp/association.hpp"
#include "camtt/mp/filter.hpp"
#include "camtt/mp/tracks.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace camtt;
using namespace camtt::mp;

using oracle::betas;
using oracle::random_instance;
using oracle::random_spd;

TEST(Kalman, MatchesTextbookUpdate) {
  Rng rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  MotionModel model;
  for (int k = 0; k < 200; ++k) {
    KinematicBelief pred{Vec3(1000 + 100 * n(rng), 5 * n(rng), 0.01 * n(rng)), random_spd(rng)};
    const Vec2 z(pred.mean(0) + 20 * n(rng), -2 * pred.mean(1) / model.wavelength + n(rng));
    const std::vector<Vec2> zs{z};
    const std::vector<double> w{1.0};
    const auto post = update_kinematic(pred, zs, w, model);
    Vec3 x;
    Mat3 p;
    oracle::kalman_update<3, 2>(pred.mean, pred.cov, model.observation(), model.noise(), z, x, p);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(post.mean(i), x(i), 1e-10 * (1 + std::abs(x(i))));
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(post.cov.data()[i], p.data()[i], 1e-10 * (1 + p.cwiseAbs().maxCoeff()));
    const Mat3 diff = pred.cov - post.cov;
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (diff + diff.transpose()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * pred.cov.norm());
  }
}

TEST(Kalman, WeightedUpdateMatchesInformationForm) {
  Rng rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MotionModel model;
  const Mat23 h = model.observation();
  const Mat2 rinv = model.noise().inverse();
  for (int k = 0; k < 100; ++k) {
    KinematicBelief pred{Vec3(500, 3, 0), random_spd(rng)};
    std::vector<Vec2> zs;
    std::vector<double> w;
    for (int j = 0; j < 3; ++j) {
      zs.emplace_back(500 + 20 * n(rng), -2 * 3 / model.wavelength + n(rng));
      w.push_back(u(rng) / 3);
    }
    const auto post = update_kinematic(pred, zs, w, model);
    Mat3 info = pred.cov.inverse();
    Vec3 vec = info * pred.mean;
    for (int j = 0; j < 3; ++j) {
      info += w[j] * h.transpose() * rinv * h;
      vec += w[j] * h.transpose() * rinv * zs[j];
    }
    const Mat3 p = info.inverse();
    const Vec3 x = p * vec;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(post.mean(i), x(i), 1e-8 * (1 + std::abs(x(i))));
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(post.cov.data()[i], p.data()[i], 1e-8 * (1 + p.cwiseAbs().maxCoeff()));
  }
}

TEST(Kalman, ZeroWeightsLeavePrediction) {
  MotionModel model;
  KinematicBelief pred{Vec3(1, 2, 3), Mat3::Identity()};
  const std::vector<Vec2> zs{Vec2(100, 100)};
  const std::vector<double> w{0.0};
  const auto post = update_kinematic(pred, zs, w, model);
  EXPECT_EQ(post.mean, pred.mean);
  EXPECT_THROW(update_kinematic(pred, zs, std::vector<double>{}, model), SizeError);
}

TEST(Kalman, SingularNoiseRejected) {
  MotionModel model;
  model.doppler_std = 0.0;
  const std::vector<KinematicBelief> pred(1);
  const std::vector<Vec2> z{Vec2::Zero()};
  EXPECT_THROW(evaluate_measurements(pred, z, model, DetectionModelParams{}), ConfigError);
}

TEST(Kalman, PredictionMatchesTransition) {
  MotionModel model;
  KinematicBelief b{Vec3(100, 2, 0.1), Mat3::Identity()};
  const auto p = predict_kinematic(b, model);
  EXPECT_NEAR(p.mean(0), 100 + 2 * 10 + 0.5 * 0.1 * 100, 1e-12);
  EXPECT_NEAR(p.mean(1), 2 + 0.1 * 10, 1e-12);
  const Mat3 f = model.transition();
  const Mat3 expect = f * f.transpose() + model.process_noise();
  EXPECT_LE((p.cov - expect).norm(), 1e-9 * expect.norm());
}

TEST(Visibility, PredictAndUpdate) {
  EXPECT_NEAR(predict_visibility({1.0}).p_visible, 0.85, 1e-15);
  EXPECT_NEAR(predict_visibility({0.0}).p_visible, 0.15, 1e-15);
  EXPECT_NEAR(predict_visibility({0.5}).p_visible, 0.5, 1e-15);
  Mat2 t;
  t << 0.85, 0.15, 0.15, 0.85;
  EXPECT_NEAR(predict_visibility({0.3}, t).p_visible, predict_visibility({0.3}).p_visible, 1e-15);

  DetectionModelParams params;
  // A sure detection: posterior ratio pd / pd_invisible.
  const double post = update_visibility({0.5}, 0.0, params).p_visible;
  EXPECT_NEAR(post, 0.9 / (0.9 + 0.01), 1e-12);
  const double miss = update_visibility({0.5}, 1.0, params).p_visible;
  EXPECT_NEAR(miss, 0.1 / (0.1 + 0.99), 1e-12);

  const auto w = evaluate_visibility({0.7}, params);
  EXPECT_NEAR(w.detected + w.missed, 1.0, 1e-15);
}

TEST(Evaluation, LikelihoodAndGate) {
  MotionModel model;
  DetectionModelParams params;
  KinematicBelief b{Vec3(1000, 0, 0), Mat3::Identity() * 1e-6};
  const std::vector<KinematicBelief> pred{b};
  const std::vector<Vec2> z{Vec2(1000, 0), Vec2(1000 + 15, 0), Vec2(5000, 0)};
  const auto l = evaluate_measurements(pred, z, model, params);
  ASSERT_EQ(l.rows(), 2u);
  ASSERT_EQ(l.cols(), 4u);
  EXPECT_EQ(l(0, 1), params.pfa_prior);
  EXPECT_NEAR(l(1, 1) / l(1, 2), std::exp(0.5), 1e-6);
  EXPECT_EQ(l(1, 3), 0.0);
}

TEST(Association, MatchesEnumerationOnTrees) {
  Rng rng(21);
  int trees = 0;
  for (int k = 0; k < 300; ++k) {
    const std::size_t nt = 1 + k % 3, nm = 1 + (k / 3) % 4;
    auto in = random_instance(rng, nt, nm, 0.5);
    std::vector<double> b0;
    const auto beta = betas(in, b0);
    if (!oracle::is_forest(beta)) continue;
    ++trees;
    const auto bp = bp_data_association(in.likelihood, in.vis, in.clutter);
    const auto ex = oracle::enumerate_association(beta, b0, in.clutter);
    EXPECT_TRUE(bp.converged);
    for (std::size_t i = 0; i <= nt; ++i)
      for (std::size_t j = 0; j <= nm; ++j) {
        if (i == 0 && j == 0) continue;
        EXPECT_NEAR(bp.marginals(i, j), ex(i, j), 1e-6) << "instance " << k;
      }
  }
  EXPECT_GT(trees, 100);
}

TEST(Association, LoopyMarginalsNormalized) {
  Rng rng(22);
  for (int k = 0; k < 100; ++k) {
    auto in = random_instance(rng, 3, 4, 0.0);
    const auto bp = bp_data_association(in.likelihood, in.vis, in.clutter);
    EXPECT_TRUE(bp.converged);
    EXPECT_LE(bp.iterations, 1000);
    for (std::size_t i = 1; i <= 3; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= 4; ++j) s += bp.marginals(i, j);
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
    for (std::size_t j = 1; j <= 4; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= 3; ++i) s += bp.marginals(i, j);
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(Association, NoTargetsMeansAllClutter) {
  Grid<double> l(1, 3, 0.0);
  const std::vector<double> c{1, 2};
  const auto bp = bp_data_association(l, std::vector<VisibilityWeights>{}, c);
  EXPECT_EQ(bp.clutter(0), 1.0);
  EXPECT_EQ(bp.clutter(1), 1.0);
  const auto prior = prior_clutter_beliefs(l, std::vector<VisibilityWeights>{}, c);
  EXPECT_EQ(prior[0], 1.0);
}

TEST(Association, InvalidInputs) {
  Grid<double> l(2, 2, 1.0);
  const std::vector<VisibilityWeights> v{{0.5, 0.5}};
  EXPECT_THROW(bp_data_association(l, v, std::vector<double>{0.0}), ConfigError);
  EXPECT_THROW(bp_data_association(l, v, std::vector<double>{1.0, 1.0}), SizeError);
}

TEST(Association, PriorBeliefLowerBoundsSingleTarget) {
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    auto in = random_instance(rng, 1, 3, 0.0);
    const auto bp = bp_data_association(in.likelihood, in.vis, in.clutter);
    const auto prior = prior_clutter_beliefs(in.likelihood, in.vis, in.clutter);
    // One target: the prior pass ignores competition between measurements,
    // so it never assigns less clutter belief than the exact answer.
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(prior[j], bp.clutter(j) + 1e-12);
  }
}

TEST(Tracks, ConfirmAfterThreeHits) {
  TrackerConfig cfg;
  int next = 1;
  std::vector<Track> tracks(1);
  tracks[0].visibility = {0.9};
  AssociationBeliefs a;
  a.marginals = Grid<double>(2, 1, 0.0);
  a.marginals(1, 0) = 0.1;
  for (int scan = 0; scan < 3; ++scan) {
    EXPECT_EQ(tracks[0].status, TrackStatus::tentative);
    auto r = manage_tracks(std::move(tracks), a, {}, scan, cfg, next);
    tracks = std::move(r.alive);
    ASSERT_EQ(tracks.size(), 1u);
  }
  EXPECT_EQ(tracks[0].status, TrackStatus::confirmed);
}

TEST(Tracks, TerminateAfterThreeLowScans) {
  TrackerConfig cfg;
  int next = 1;
  std::vector<Track> tracks(1);
  tracks[0].visibility = {0.2};
  AssociationBeliefs a;
  a.marginals = Grid<double>(2, 1, 0.0);
  a.marginals(1, 0) = 0.1;
  for (int scan = 0; scan < 2; ++scan) {
    auto r = manage_tracks(std::move(tracks), a, {}, scan, cfg, next);
    tracks = std::move(r.alive);
    ASSERT_EQ(tracks.size(), 1u);
  }
  auto r = manage_tracks(std::move(tracks), a, {}, 2, cfg, next);
  EXPECT_TRUE(r.alive.empty());
  ASSERT_EQ(r.terminated.size(), 1u);
  EXPECT_EQ(r.terminated[0].status, TrackStatus::terminated);
}

TEST(Tracks, BirthFromUnexplainedMeasurement) {
  TrackerConfig cfg;
  int next = 7;
  AssociationBeliefs a;
  a.marginals = Grid<double>(1, 3, 0.0);
  a.marginals(0, 1) = 1.0;
  a.marginals(0, 2) = 0.2;
  const std::vector<Vec2> z{Vec2(900, -100), Vec2(100, 0)};
  auto r = manage_tracks({}, a, z, 4, cfg, next);
  ASSERT_EQ(r.alive.size(), 1u);
  EXPECT_EQ(r.alive[0].id, 7);
  EXPECT_EQ(next, 8);
  EXPECT_EQ(r.alive[0].birth_scan, 4);
  EXPECT_DOUBLE_EQ(r.alive[0].kinematic.mean(0), 900.0);
  EXPECT_NEAR(r.alive[0].kinematic.mean(1), 100.0 * cfg.motion.wavelength / 2.0, 1e-12);
}

TEST(Tracks, HistoryCsvHeader) {
  std::ostringstream os;
  const std::vector<TrackHistoryRow> rows{{0, 1, TrackStatus::confirmed, Vec3(1, 2, 3), 0.5}};
  write_track_history(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "scan,track_id,status,range,range_rate,range_accel,p_visible");
}
