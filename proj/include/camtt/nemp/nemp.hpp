#pragma once

#include "camtt/core.hpp"
#include "camtt/detect/detector.hpp"
#include "camtt/ds/evidence.hpp"
#include "camtt/mp/association.hpp"
#include "camtt/mp/filter.hpp"
#include "camtt/mp/tracks.hpp"
#include "camtt/nn/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace camtt::nemp {

enum class Mode { mp, mp_nn, nemp };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::mp: return "MP";
    case Mode::mp_nn: return "MP-NN";
    case Mode::nemp: return "NEMP";
  }
  return "MP";
}

inline Mode mode_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "MP") return Mode::mp;
  if (u == "MP-NN" || u == "MPNN" || u == "MP_NN") return Mode::mp_nn;
  if (u == "NEMP") return Mode::nemp;
  throw ConfigError("unknown method '" + s + "' (expected MP, MP-NN or NEMP)");
}

struct NempConfig {
  Mode mode = Mode::nemp;
  int iterations = 3;
  double suppression_threshold = 0.5;  // MP-NN keeps measurements at or above

  void validate() const {
    require(iterations >= 1, "nemp.iterations must be >= 1");
    require(suppression_threshold >= 0.0 && suppression_threshold <= 1.0,
            "nemp.suppression_threshold must lie in [0,1]");
  }
};

/// Feature extraction plus belief-conditioned classification.
class MeasurementClassifier {
 public:
  virtual ~MeasurementClassifier() = default;
  /// One row of features per patch.
  virtual nn::Tensor features(std::span<const Grid<double>* const> patches) = 0;
  /// Target probability per measurement.
  virtual std::vector<double> classify(const nn::Tensor& features, std::span<const double> clutter_beliefs) = 0;
};

class NetworkClassifier : public MeasurementClassifier {
 public:
  explicit NetworkClassifier(nn::Classifier model) : model_(std::move(model)) {}
  nn::Tensor features(std::span<const Grid<double>* const> patches) override { return model_.features(patches); }
  std::vector<double> classify(const nn::Tensor& f, std::span<const double> b) override {
    return model_.classify(f, b);
  }

 private:
  nn::Classifier model_;
};

/// Outputs the same probability for every measurement.
class ConstantClassifier : public MeasurementClassifier {
 public:
  explicit ConstantClassifier(double value = 0.5) : value_(value) {}
  nn::Tensor features(std::span<const Grid<double>* const> patches) override {
    return nn::Tensor({patches.size(), 1});
  }
  std::vector<double> classify(const nn::Tensor&, std::span<const double> b) override {
    return std::vector<double>(b.size(), value_);
  }

 private:
  double value_;
};

struct ScanState {
  std::vector<mp::Track> tracks;
  int scan_index = 0;
  int next_id = 1;
};

struct LoopResult {
  mp::AssociationBeliefs assoc;
  std::vector<double> fused;                        // fused target probability, last iteration
  std::vector<std::vector<double>> classifier;      // per iteration
  std::vector<std::vector<double>> fused_history;   // per iteration
  std::vector<double> clutter_messages;             // final BP clutter weights
};

inline constexpr double kMessageFloor = 1e-250;
inline constexpr double kMessageCeil = 1e250;

/// Replaces clutter message `c` so that, with the remaining messages held,
/// the clutter marginal would move from `b` to `q`. Falls back to the
/// classifier odds when `b` is degenerate (no target competes for the
/// measurement).
inline double refine_clutter_message(double c, double b, double q, double omega) {
  double ratio;
  if (b > 0.0 && b < 1.0) {
    if (q <= 0.0) return kMessageFloor;
    if (q >= 1.0) return kMessageCeil;
    ratio = (q / (1.0 - q)) / (b / (1.0 - b));
  } else {
    const double w = std::clamp(omega, 1e-12, 1.0 - 1e-12);
    ratio = (1.0 - w) / w;
  }
  return std::clamp(c * ratio, kMessageFloor, kMessageCeil);
}

/// T rounds of: classify with the current clutter belief, fuse with DS,
/// refine clutter messages, rerun BP.
inline LoopResult nemp_da_loop(const Grid<double>& likelihood, std::span<const mp::VisibilityWeights> vis,
                               const nn::Tensor& features, std::vector<double> clutter_init,
                               MeasurementClassifier& classifier, int iterations, const mp::BpConfig& bp) {
  require(iterations >= 1, "NEMP needs at least one iteration");
  LoopResult out;
  std::vector<double> c = std::move(clutter_init);
  std::vector<double> b = mp::prior_clutter_beliefs(likelihood, vis, c);
  const std::size_t nm = c.size();
  for (int t = 0; t < iterations; ++t) {
    const auto omega = classifier.classify(features, b);
    if (omega.size() != nm) throw SizeError("classifier output count differs from measurements");
    std::vector<double> fused(nm);
    for (std::size_t j = 0; j < nm; ++j) {
      const auto m = ds::ds_combine_checked(ds::bba_from_probability(1.0 - b[j]),
                                            ds::bba_from_probability(std::clamp(omega[j], 0.0, 1.0)));
      fused[j] = std::clamp(ds::pignistic(m.mass), 0.0, 1.0);
      c[j] = refine_clutter_message(c[j], b[j], 1.0 - fused[j], omega[j]);
    }
    out.assoc = mp::bp_data_association(likelihood, vis, c, bp);
    for (std::size_t j = 0; j < nm; ++j) b[j] = out.assoc.clutter(j);
    out.classifier.push_back(omega);
    out.fused_history.push_back(fused);
    out.fused = std::move(fused);
  }
  out.clutter_messages = c;
  return out;
}

struct ScanResult {
  mp::AssociationBeliefs assoc;
  std::vector<std::size_t> kept;  // indices into the scan's measurements that entered the tracker
  std::vector<double> prior_clutter;
  std::vector<double> fused;
  std::vector<std::vector<double>> classifier;
  std::vector<mp::Track> terminated;
};

/// One scan of the tracker: prediction, evaluation, association (with the
/// classifier according to the mode), update and track management.
inline ScanResult process_scan(ScanState& state, std::span<const detect::Measurement> meas,
                               MeasurementClassifier* classifier, const mp::TrackerConfig& cfg,
                               const NempConfig& ncfg) {
  ncfg.validate();
  if (ncfg.mode != Mode::mp && classifier == nullptr) throw ConfigError("mode " + to_string(ncfg.mode) + " needs a classifier");
  ScanResult res;

  for (auto& t : state.tracks) {
    t.kinematic = mp::predict_kinematic(t.kinematic, cfg.motion);
    t.visibility = mp::predict_visibility(t.visibility, cfg.visibility_stay);
  }
  std::vector<mp::KinematicBelief> pred;
  std::vector<mp::VisibilityWeights> vis;
  for (const auto& t : state.tracks) {
    pred.push_back(t.kinematic);
    vis.push_back(mp::evaluate_visibility(t.visibility, cfg.detection));
  }

  std::vector<Vec2> z_all;
  std::vector<const Grid<double>*> patches_all;
  for (const auto& m : meas) {
    z_all.push_back(m.position());
    patches_all.push_back(&m.rd_patch);
  }

  nn::Tensor feats_all;
  if (ncfg.mode != Mode::mp && !meas.empty()) feats_all = classifier->features(patches_all);

  // Measurement set entering the tracker.
  std::vector<std::size_t> kept(meas.size());
  for (std::size_t j = 0; j < kept.size(); ++j) kept[j] = j;
  if (ncfg.mode == Mode::mp_nn && !meas.empty()) {
    const auto l = mp::evaluate_measurements(pred, z_all, cfg.motion, cfg.detection, cfg.gate);
    std::vector<double> c(meas.size(), cfg.detection.pfa_prior);
    const auto b = mp::prior_clutter_beliefs(l, vis, c);
    const auto omega = classifier->classify(feats_all, b);
    res.classifier.push_back(omega);
    kept.clear();
    for (std::size_t j = 0; j < meas.size(); ++j)
      if (omega[j] >= ncfg.suppression_threshold) kept.push_back(j);
  }
  std::vector<Vec2> z;
  for (std::size_t j : kept) z.push_back(z_all[j]);

  const auto l = mp::evaluate_measurements(pred, z, cfg.motion, cfg.detection, cfg.gate);
  std::vector<double> clutter(z.size(), cfg.detection.pfa_prior);
  res.prior_clutter = mp::prior_clutter_beliefs(l, vis, clutter);

  if (ncfg.mode == Mode::nemp && !z.empty()) {
    auto loop = nemp_da_loop(l, vis, feats_all, clutter, *classifier, ncfg.iterations, cfg.bp);
    res.assoc = std::move(loop.assoc);
    res.fused = std::move(loop.fused);
    res.classifier = std::move(loop.classifier);
  } else {
    res.assoc = mp::bp_data_association(l, vis, clutter, cfg.bp);
    res.fused.resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) res.fused[j] = 1.0 - res.assoc.clutter(j);
  }

  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < state.tracks.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) w[j] = res.assoc.assoc(i, j);
    auto& t = state.tracks[i];
    t.kinematic = mp::update_kinematic(t.kinematic, z, w, cfg.motion);
    t.visibility = mp::update_visibility(t.visibility, res.assoc.missed(i), cfg.detection);
  }

  auto managed = mp::manage_tracks(std::move(state.tracks), res.assoc, z, state.scan_index, cfg, state.next_id);
  state.tracks = std::move(managed.alive);
  res.terminated = std::move(managed.terminated);
  res.kept = std::move(kept);
  ++state.scan_index;
  return res;
}

/// JSON-lines diagnostic record for one scan.
inline nlohmann::json diagnostics(const ScanResult& r, int scan, Mode mode) {
  nlohmann::json j;
  j["scan"] = scan;
  j["mode"] = to_string(mode);
  j["kept"] = r.kept;
  const auto& g = r.assoc.marginals;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < g.rows(); ++i) rows.push_back(std::vector<double>(g.row(i).begin(), g.row(i).end()));
  j["marginals"] = rows;
  j["bp_iterations"] = r.assoc.iterations;
  j["bp_converged"] = r.assoc.converged;
  j["prior_clutter"] = r.prior_clutter;
  j["fused"] = r.fused;
  j["classifier"] = r.classifier;
  return j;
}

}  // namespace camtt::nemp
