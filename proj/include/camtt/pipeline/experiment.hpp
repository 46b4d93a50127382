#pragma once

#include "camtt/core.hpp"
#include "camtt/detect/detector.hpp"
#include "camtt/metrics/metrics.hpp"
#include "camtt/mp/tracks.hpp"
#include "camtt/nemp/nemp.hpp"
#include "camtt/nn/labels.hpp"
#include "camtt/nn/network.hpp"
#include "camtt/nn/train.hpp"
#include "camtt/scenario/rd_map.hpp"
#include "camtt/scenario/returns.hpp"
#include "camtt/scenario/truth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace camtt::pipeline {

struct DatasetSettings {
  int runs = 8;
  std::vector<double> scr_db{-4.0, 0.0, 4.0};
  nn::LabelRule labels;
};

struct ExperimentConfig {
  scenario::ScenarioConfig scenario;
  detect::DetectorConfig detector;
  mp::TrackerConfig tracker;
  nemp::NempConfig nemp;
  nn::TrainConfig train;
  DatasetSettings dataset;

  std::vector<double> scr_db{-20, -16, -12, -8, -4, 0, 4, 8, 12, 16, 20};
  int runs = 40;
  std::vector<nemp::Mode> methods{nemp::Mode::mp, nemp::Mode::mp_nn, nemp::Mode::nemp};
  std::uint64_t seed = 1;
  std::string out = "out";
  int workers = 0;  // 0: hardware concurrency

  double ospa_c = 9.4;
  double ospa_p = 2.0;
  double match_gate = 9.4;

  /// Tracker motion model and label rule follow the scenario geometry.
  [[nodiscard]] mp::TrackerConfig tracker_config() const {
    mp::TrackerConfig t = tracker;
    t.motion.scan_interval = scenario.scan_interval;
    t.motion.sigma_accel = scenario.sigma_accel;
    t.motion.wavelength = scenario.radar.wavelength();
    return t;
  }
  [[nodiscard]] nn::LabelRule label_rule() const {
    nn::LabelRule r = dataset.labels;
    r.wavelength = scenario.radar.wavelength();
    return r;
  }
  [[nodiscard]] metrics::MatchSettings match_settings() const {
    metrics::MatchSettings s;
    s.gate = match_gate;
    s.wavelength = scenario.radar.wavelength();
    return s;
  }
  [[nodiscard]] nn::CnnConfig network_config() const {
    nn::CnnConfig c;
    c.rows = static_cast<std::size_t>(detector.patch_range_bins);
    c.cols = static_cast<std::size_t>(detector.patch_doppler_bins);
    return c;
  }

  void validate() const {
    scenario.validate();
    detector.validate();
    tracker_config().validate();
    nemp.validate();
    train.validate();
    network_config().validate();
    require(std::has_single_bit(static_cast<unsigned>(scenario.radar.pulses_per_scan)),
            "radar.pulses_per_scan must be a power of two");
    require(detector.patch_doppler_bins <= scenario.radar.pulses_per_scan,
            "detector.patch_doppler_bins exceeds the Doppler axis");
    require(!scr_db.empty(), "sweep.scr must list at least one value");
    for (double s : scr_db) require(std::isfinite(s), "sweep.scr values must be finite");
    require(runs >= 1, "sweep.runs must be >= 1");
    require(!methods.empty(), "sweep.methods must list at least one method");
    require(dataset.runs >= 1, "dataset.runs must be >= 1");
    require(!dataset.scr_db.empty(), "dataset.scr must list at least one value");
    require(dataset.labels.t_dist > 0.0, "dataset.t_dist must be > 0");
    require(ospa_c > 0.0 && ospa_p >= 1.0, "metrics: ospa_c must be > 0 and ospa_p >= 1");
    require(match_gate > 0.0, "metrics.match_gate must be > 0");
    require(workers >= 0, "experiment.workers must be >= 0");
  }
};

// ---- Seeds ----

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class SeedDomain : std::uint64_t { dataset = 0x64617461ULL, tracking = 0x7472636bULL, training = 0x7472616eULL };

/// Seed for run `run` at sweep point `point`. Domains never share seeds in
/// practice, so classifier training data stays disjoint from evaluation runs.
inline std::uint64_t derive_seed(std::uint64_t base, SeedDomain domain, std::uint64_t point, std::uint64_t run) {
  std::uint64_t h = splitmix64(base ^ static_cast<std::uint64_t>(domain));
  h = splitmix64(h ^ point);
  return splitmix64(h ^ run);
}

// ---- Worker pool ----

inline std::size_t worker_count(int requested, std::size_t tasks) {
  std::size_t n = requested > 0 ? static_cast<std::size_t>(requested) : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, tasks));
}

/// Evaluates fn(0..n-1) on a pool of threads; results come back in index
/// order. The first exception thrown by a task is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int workers, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  const std::size_t nt = worker_count(workers, n);
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---- Simulation ----

struct Scene {
  std::vector<scenario::TruthTarget> truth;
  std::vector<std::vector<detect::Measurement>> scans;

  /// Truth states present at scan k.
  [[nodiscard]] std::vector<metrics::Object> truth_at(int k) const {
    std::vector<metrics::Object> out;
    for (const auto& t : truth)
      if (t.alive_at(k)) out.push_back({t.id, t.state_at(k)});
    return out;
  }
};

/// Truth, radar returns, RD maps and detections for one Monte Carlo run.
inline Scene simulate_scene(const ExperimentConfig& cfg, double scr_db, std::uint64_t seed) {
  Scene s;
  s.truth = scenario::generate_truth(cfg.scenario, seed);
  const auto pulses = scenario::synthesize_returns(s.truth, cfg.scenario, scr_db, seed);
  const auto cpi = static_cast<std::size_t>(cfg.scenario.radar.pulses_per_scan);
  for (const auto& pm : pulses) s.scans.push_back(detect::detect_measurements(scenario::form_rd_map(pm, cpi), cfg.detector));
  return s;
}

// ---- Tracking ----

struct PerScan {
  int scan = 0;
  double ospa = 0.0;
  std::optional<double> rmse_position, rmse_velocity;
  int num_measurements = 0;
  int num_kept = 0;
  int num_confirmed = 0;
};

struct RunOutcome {
  metrics::MetricReport report;
  std::vector<PerScan> per_scan;
  std::vector<mp::TrackHistoryRow> history;
  std::vector<nlohmann::json> diagnostics;
  std::vector<mp::AssociationBeliefs> marginals;
};

/// Runs one tracker over a simulated scene and scores confirmed tracks.
inline RunOutcome track_scene(const Scene& scene, nemp::Mode mode, nemp::MeasurementClassifier* classifier,
                              const ExperimentConfig& cfg, bool keep_details = false) {
  const mp::TrackerConfig tcfg = cfg.tracker_config();
  nemp::NempConfig ncfg = cfg.nemp;
  ncfg.mode = mode;
  nemp::ScanState state;
  RunOutcome out;
  std::vector<metrics::Frame> frames;
  for (std::size_t k = 0; k < scene.scans.size(); ++k) {
    const auto& meas = scene.scans[k];
    auto res = nemp::process_scan(state, meas, classifier, tcfg, ncfg);
    metrics::Frame f;
    f.truth = scene.truth_at(static_cast<int>(k));
    for (const auto& t : state.tracks)
      if (t.status == mp::TrackStatus::confirmed) f.estimates.push_back({t.id, t.kinematic.mean});
    PerScan ps;
    ps.scan = static_cast<int>(k);
    ps.num_measurements = static_cast<int>(meas.size());
    ps.num_kept = static_cast<int>(res.kept.size());
    ps.num_confirmed = static_cast<int>(f.estimates.size());
    out.per_scan.push_back(ps);
    frames.push_back(std::move(f));
    if (keep_details) {
      for (const auto& t : state.tracks)
        out.history.push_back({static_cast<int>(k), t.id, t.status, t.kinematic.mean, t.visibility.p_visible});
      for (const auto& t : res.terminated)
        out.history.push_back({static_cast<int>(k), t.id, t.status, t.kinematic.mean, t.visibility.p_visible});
      out.diagnostics.push_back(nemp::diagnostics(res, static_cast<int>(k), mode));
    }
    out.marginals.push_back(std::move(res.assoc));
  }
  out.report = metrics::evaluate(frames, cfg.match_settings(), cfg.ospa_c, cfg.ospa_p);
  for (std::size_t k = 0; k < out.per_scan.size(); ++k) {
    out.per_scan[k].ospa = out.report.ospa_per_scan[k];
    out.per_scan[k].rmse_position = out.report.rmse_position_per_scan[k];
    out.per_scan[k].rmse_velocity = out.report.rmse_velocity_per_scan[k];
  }
  return out;
}

// ---- Dataset ----

struct Sample {
  Grid<double> patch;
  int label = 0;
  double belief = 0.0;  // clutter belief of the measurement after MP association
  double scr_db = 0.0;
  int run = 0;
  int scan = 0;
  double range = 0.0;
  double doppler = 0.0;
};

/// Labelled patches from one scene. The belief column is the MP clutter
/// marginal the classifier will be conditioned on when tracking.
inline std::vector<Sample> scene_samples(const Scene& scene, const ExperimentConfig& cfg, double scr_db, int run) {
  const auto tcfg = cfg.tracker_config();
  nemp::NempConfig ncfg = cfg.nemp;
  ncfg.mode = nemp::Mode::mp;
  const auto rule = cfg.label_rule();
  nemp::ScanState state;
  std::vector<Sample> out;
  for (std::size_t k = 0; k < scene.scans.size(); ++k) {
    const auto& meas = scene.scans[k];
    const auto res = nemp::process_scan(state, meas, nullptr, tcfg, ncfg);
    std::vector<Vec3> truth;
    for (const auto& o : scene.truth_at(static_cast<int>(k))) truth.push_back(o.state);
    std::vector<Vec2> z;
    for (const auto& m : meas) z.push_back(m.position());
    const auto labels = nn::label_measurements(z, truth, rule);
    for (std::size_t j = 0; j < meas.size(); ++j)
      out.push_back({meas[j].rd_patch, labels[j], res.assoc.clutter(j), scr_db, run, static_cast<int>(k),
                     meas[j].range, meas[j].doppler});
  }
  return out;
}

/// Scenes over the dataset SCR list and runs, on seeds disjoint from tracking.
inline std::vector<Sample> generate_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_scr = cfg.dataset.scr_db.size();
  const std::size_t n = n_scr * static_cast<std::size_t>(cfg.dataset.runs);
  auto parts = parallel_map<std::vector<Sample>>(n, cfg.workers, [&](std::size_t i) {
    const std::size_t p = i / static_cast<std::size_t>(cfg.dataset.runs);
    const int run = static_cast<int>(i % static_cast<std::size_t>(cfg.dataset.runs));
    const double scr = cfg.dataset.scr_db[p];
    const auto seed = derive_seed(cfg.seed, SeedDomain::dataset, p, static_cast<std::uint64_t>(run));
    return scene_samples(simulate_scene(cfg, scr, seed), cfg, scr, run);
  });
  std::vector<Sample> out;
  for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;
}

/// Two-step training on a dataset; throws ConfigError on a single-class set.
inline nn::TrainResult train_classifier(nn::Classifier& model, const std::vector<Sample>& samples,
                                        const ExperimentConfig& cfg) {
  nn::TrainingSet set;
  for (const auto& s : samples) {
    set.patches.push_back(&s.patch);
    set.labels.push_back(static_cast<double>(s.label));
    set.beliefs.push_back(s.belief);
  }
  nn::TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, SeedDomain::training, 0, 0);
  model.init(tc.seed);
  return nn::train(model, set, tc);
}

// ---- Sweep ----

struct ResultRow {
  nemp::Mode method = nemp::Mode::mp;
  double scr_db = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  metrics::MetricReport report;
  std::vector<PerScan> per_scan;
  std::vector<mp::TrackHistoryRow> history;
  std::vector<nlohmann::json> diagnostics;
};

struct SummaryRow {
  nemp::Mode method = nemp::Mode::mp;
  double scr_db = 0.0;
  int runs = 0;
  double mospa = 0.0;
  double amot = 0.0;
  double ids = 0.0;
  double frag = 0.0;
  double false_negatives = 0.0;
  double false_positives = 0.0;
  std::optional<double> rmse_position, rmse_velocity;  // mean over runs with matches
};

/// Simulates every (SCR, run) once and tracks it with every method. Rows are
/// ordered by method (config order), then SCR, then run.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const nn::Classifier* model, bool keep_details) {
  cfg.validate();
  for (auto m : cfg.methods)
    if (m != nemp::Mode::mp && model == nullptr)
      throw ConfigError("method " + nemp::to_string(m) + " needs classifier weights");
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);
  const std::size_t n = cfg.scr_db.size() * runs;
  auto per_scene = parallel_map<std::vector<ResultRow>>(n, cfg.workers, [&](std::size_t i) {
    const std::size_t p = i / runs;
    const int run = static_cast<int>(i % runs);
    const auto seed = derive_seed(cfg.seed, SeedDomain::tracking, p, static_cast<std::uint64_t>(run));
    const Scene scene = simulate_scene(cfg, cfg.scr_db[p], seed);
    std::vector<ResultRow> rows;
    for (auto m : cfg.methods) {
      std::optional<nemp::NetworkClassifier> clf;
      if (m != nemp::Mode::mp) clf.emplace(*model);
      auto o = track_scene(scene, m, clf ? &*clf : nullptr, cfg, keep_details);
      rows.push_back({m, cfg.scr_db[p], run, seed, std::move(o.report), std::move(o.per_scan), std::move(o.history),
                      std::move(o.diagnostics)});
    }
    return rows;
  });
  std::vector<ResultRow> out;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
    for (auto& scene_rows : per_scene) out.push_back(std::move(scene_rows[mi]));
  return out;
}

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<int> rp_count, rv_count;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SummaryRow& s) { return s.method == r.method && s.scr_db == r.scr_db; });
    if (it == out.end()) {
      out.push_back({r.method, r.scr_db});
      rp_count.push_back(0);
      rv_count.push_back(0);
      it = out.end() - 1;
    }
    const auto k = static_cast<std::size_t>(it - out.begin());
    ++it->runs;
    it->mospa += r.report.mospa;
    it->amot += r.report.amot;
    it->ids += r.report.ids;
    it->frag += r.report.frag;
    it->false_negatives += r.report.false_negatives;
    it->false_positives += r.report.false_positives;
    if (r.report.rmse_position) {
      it->rmse_position = it->rmse_position.value_or(0.0) + *r.report.rmse_position;
      ++rp_count[k];
    }
    if (r.report.rmse_velocity) {
      it->rmse_velocity = it->rmse_velocity.value_or(0.0) + *r.report.rmse_velocity;
      ++rv_count[k];
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& s = out[k];
    const double n = s.runs;
    s.mospa /= n;
    s.amot /= n;
    s.ids /= n;
    s.frag /= n;
    s.false_negatives /= n;
    s.false_positives /= n;
    if (s.rmse_position) *s.rmse_position /= rp_count[k];
    if (s.rmse_velocity) *s.rmse_velocity /= rv_count[k];
  }
  return out;
}

}  // namespace camtt::pipeline
