// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include "camtt/detect/detector.hpp"
#include "camtt/ds/evidence.hpp"
#include "camtt/metrics/metrics.hpp"
#include "camtt/mp/association.hpp"
#include "camtt/mp/filter.hpp"
#include "camtt/pipeline/commands.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace camtt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---- 1: evidence algebra ----

Outcome evidence_algebra(const fs::path&) {
  Stopwatch sw;
  Rng rng(1001);
  bool commutative = true;
  double assoc_err = 0.0, pign_err = 0.0, mass_err = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto a = oracle::random_bba(rng), b = oracle::random_bba(rng), c = oracle::random_bba(rng);
    const auto ab = ds::ds_combine(a, b), ba = ds::ds_combine(b, a);
    commutative = commutative && ab.clutter == ba.clutter && ab.target == ba.target && ab.omega == ba.omega &&
                  ab.empty == ba.empty;
    const auto l = ds::ds_combine(ab, c), r = ds::ds_combine(a, ds::ds_combine(b, c));
    assoc_err = std::max({assoc_err, std::abs(l.clutter - r.clutter), std::abs(l.target - r.target),
                          std::abs(l.omega - r.omega)});
    pign_err = std::max(pign_err, std::abs(ds::pignistic(l) + ds::pignistic_clutter(l) - 1.0));
    mass_err = std::max(mass_err, std::abs(l.total() - 1.0));
  }
  const auto m = ds::ds_combine(ds::bba_from_probability(0.6), ds::bba_from_probability(0.8));
  const double example_err = std::abs(ds::pignistic(m) - 6.0 / 7.0);
  const double t = sw.seconds();
  const bool pass = commutative && assoc_err <= 1e-12 && pign_err <= 1e-12 && mass_err <= 1e-12 &&
                    example_err <= 1e-12 && t < 1.0;
  return {pass, std::string("10^4 triples, commutative ") + (commutative ? "exact" : "NOT exact") +
                    ", associativity err " + fmt(assoc_err) + ", pignistic sum err " + fmt(pign_err) +
                    ", 0.6(+)0.8 err " + fmt(example_err) + ", " + fmt(t, 3) + " s"};
}

// ---- 2: BP against exhaustive enumeration ----

Outcome bp_oracle(const fs::path&) {
  Stopwatch sw;
  Rng rng(1002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const mp::BpConfig bp_cfg;
  int trees = 0, loopy = 0, not_converged = 0;
  double tree_err = 0.0, norm_err = 0.0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t nt = 1 + k % 3, nm = 1 + (k / 3) % 4;
    const double sparsity = k % 2 == 0 ? 0.6 * u(rng) : 0.0;
    const auto in = oracle::random_instance(rng, nt, nm, sparsity);
    const auto bp = mp::bp_data_association(in.likelihood, in.vis, in.clutter, bp_cfg);
    if (!bp.converged || bp.iterations > bp_cfg.max_iterations) ++not_converged;
    std::vector<double> b0;
    const auto beta = oracle::betas(in, b0);
    if (oracle::is_forest(beta)) {
      ++trees;
      const auto ex = oracle::enumerate_association(beta, b0, in.clutter);
      for (std::size_t i = 0; i <= nt; ++i)
        for (std::size_t j = 0; j <= nm; ++j)
          if (i != 0 || j != 0) tree_err = std::max(tree_err, std::abs(bp.marginals(i, j) - ex(i, j)));
    } else {
      ++loopy;
    }
    for (std::size_t i = 1; i <= nt; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= nm; ++j) s += bp.marginals(i, j);
      norm_err = std::max(norm_err, std::abs(s - 1.0));
    }
    for (std::size_t j = 1; j <= nm; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i <= nt; ++i) s += bp.marginals(i, j);
      norm_err = std::max(norm_err, std::abs(s - 1.0));
    }
  }
  const double t = sw.seconds();
  const bool pass = trees > 0 && loopy > 0 && tree_err <= 1e-6 && norm_err <= 1e-6 && not_converged == 0 && t < 30.0;
  return {pass, std::to_string(trees) + " trees (max err " + fmt(tree_err) + "), " + std::to_string(loopy) +
                    " loopy, normalization err " + fmt(norm_err) + ", " + std::to_string(not_converged) +
                    " not converged, " + fmt(t, 3) + " s"};
}

// ---- 3: Kalman update ----

Outcome kalman(const fs::path&) {
  Rng rng(1003);
  std::normal_distribution<double> n(0.0, 1.0);
  const mp::MotionModel model;
  double mean_err = 0.0, cov_err = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const mp::KinematicBelief pred{Vec3(1000 + 100 * n(rng), 5 * n(rng), 0.01 * n(rng)), oracle::random_spd(rng)};
    const Vec2 z(pred.mean(0) + 20 * n(rng), -2 * pred.mean(1) / model.wavelength + n(rng));
    const auto post = mp::update_kinematic(pred, std::vector<Vec2>{z}, std::vector<double>{1.0}, model);
    Vec3 x;
    Mat3 p;
    oracle::kalman_update<3, 2>(pred.mean, pred.cov, model.observation(), model.noise(), z, x, p);
    // Relative to magnitude: ranges are O(1e3) where 1e-10 absolute is near roundoff.
    for (int i = 0; i < 3; ++i) mean_err = std::max(mean_err, std::abs(post.mean(i) - x(i)) / std::max(1.0, std::abs(x(i))));
    cov_err = std::max(cov_err, (post.cov - p).cwiseAbs().maxCoeff() / std::max(1.0, p.cwiseAbs().maxCoeff()));
    const Mat3 diff = pred.cov - post.cov;
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (diff + diff.transpose()));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  const bool pass = mean_err <= 1e-10 && cov_err <= 1e-10 && min_eig >= -1e-9;
  return {pass, "1000 cases, mean err " + fmt(mean_err) + ", covariance err " + fmt(cov_err) +
                    ", min eig(P_prior - P_post) " + fmt(min_eig)};
}

// ---- 4: gradient check ----

Outcome gradients(const fs::path&) {
  Stopwatch sw;
  bool pass = true;
  std::size_t tensors = 0, checked = 0, skipped = 0;
  double worst = 0.0;
  std::string worst_name, vanishing;
  for (bool bn_train : {true, false}) {
    nn::Classifier model(gradcheck::reduced_config());
    model.init(bn_train ? 41 : 42);
    const auto batch = gradcheck::random_batch(model.config(), 4, bn_train ? 43 : 44);
    for (const auto& e : gradcheck::check(model, batch, bn_train, 1e-4, 0)) {
      ++tensors;
      checked += e.checked;
      skipped += e.skipped;
      pass = pass && e.passes(1e-4);
      if (e.relative >= 1e-4) {
        // Gradient identically zero (bias ahead of batch normalization).
        vanishing += (vanishing.empty() ? "" : ", ") + e.name + (bn_train ? "" : " (running)") + " |err| " +
                     fmt(e.absolute, 2);
      } else if (e.relative > worst) {
        worst = e.relative;
        worst_name = e.name;
      }
    }
  }
  const double t = sw.seconds();
  pass = pass && t < 60.0;
  return {pass, std::to_string(tensors) + " tensor checks (batch and running statistics), " + std::to_string(checked) +
                    " entries, " + std::to_string(skipped) + " skipped at kinks, worst rel err " + fmt(worst) + " (" +
                    worst_name + ")" +
                    (vanishing.empty() ? "" : "; zero-gradient tensors at roundoff: " + vanishing) + ", " + fmt(t, 3) +
                    " s"};
}

// ---- 5: CFAR false-alarm rate ----

Outcome cfar(const fs::path&) {
  auto map = fixtures::exponential_noise_map(200, 512, 1005);
  detect::DetectorConfig cfg;
  cfg.pfa = 0.28;
  const auto dets = detect::cfar_detect(map, cfg);
  const double cells = static_cast<double>(map.amplitude.size());
  const double rate = static_cast<double>(dets.size()) / cells;
  const double rel = std::abs(rate - 0.28) / 0.28;
  return {cells >= 1e5 && rel <= 0.15,
          fmt(cells, 6) + " cells, empirical rate " + fmt(rate) + " vs 0.28 (" + fmt(100 * rel, 3) + "% off)"};
}

// ---- 6: OSPA metric properties ----

Outcome ospa_properties(const fs::path&) {
  Rng rng(1006);
  std::normal_distribution<double> r(0.0, 40.0), d(0.0, 0.4);
  std::uniform_int_distribution<int> size(0, 5);
  const auto random_set = [&] {
    std::vector<Vec2> s(static_cast<std::size_t>(size(rng)));
    for (auto& v : s) v = Vec2(1000 + r(rng), d(rng));
    return s;
  };
  const double c = 9.4, p = 2.0;
  int violations = 0;
  double worst_symmetry = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_set(), y = random_set(), z = random_set();
    const double xy = metrics::ospa(x, y, c, p), yx = metrics::ospa(y, x, c, p);
    const double xz = metrics::ospa(x, z, c, p), yz = metrics::ospa(y, z, c, p);
    worst_symmetry = std::max(worst_symmetry, std::abs(xy - yx));
    if (metrics::ospa(x, x, c, p) != 0.0) ++violations;
    if (xy < 0.0 || xy > c + 1e-12) ++violations;
    if (xz > xy + yz + 1e-9) ++violations;
    if (!x.empty() && !y.empty() && xy == 0.0 && x.size() != y.size()) ++violations;
  }
  return {violations == 0 && worst_symmetry <= 1e-12,
          "1000 triples, " + std::to_string(violations) + " violations, symmetry err " + fmt(worst_symmetry)};
}

// ---- 7: neutral classifier ----

Outcome neutrality(const fs::path&) {
  pipeline::ExperimentConfig cfg;
  cfg.scenario.num_scans = 15;
  const auto scene = pipeline::simulate_scene(cfg, 0.0, 1007);
  nemp::ConstantClassifier half(0.5);
  const auto mp = pipeline::track_scene(scene, nemp::Mode::mp, nullptr, cfg);
  const auto ne = pipeline::track_scene(scene, nemp::Mode::nemp, &half, cfg);
  bool shapes = mp.marginals.size() == ne.marginals.size();
  double marg_err = 0.0;
  for (std::size_t k = 0; shapes && k < mp.marginals.size(); ++k) {
    const auto& a = mp.marginals[k].marginals;
    const auto& b = ne.marginals[k].marginals;
    shapes = a.rows() == b.rows() && a.cols() == b.cols();
    for (std::size_t i = 0; shapes && i < a.size(); ++i) marg_err = std::max(marg_err, std::abs(a.values()[i] - b.values()[i]));
  }
  const auto opt_err = [](const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return std::numeric_limits<double>::infinity();
    return a ? std::abs(*a - *b) : 0.0;
  };
  const double metric_err = std::max({std::abs(mp.report.mospa - ne.report.mospa),
                                      std::abs(mp.report.amot - ne.report.amot),
                                      static_cast<double>(std::abs(mp.report.ids - ne.report.ids)),
                                      static_cast<double>(std::abs(mp.report.frag - ne.report.frag)),
                                      opt_err(mp.report.rmse_position, ne.report.rmse_position),
                                      opt_err(mp.report.rmse_velocity, ne.report.rmse_velocity)});
  std::size_t assoc = 0;
  for (const auto& m : mp.marginals) assoc += m.num_measurements();
  const bool pass = shapes && assoc > 0 && marg_err <= 1e-9 && metric_err <= 1e-9;
  return {pass, "15 scans, " + std::to_string(assoc) + " measurements associated, marginal err " + fmt(marg_err) +
                    ", metric err " + fmt(metric_err) + " (MOSPA " + fmt(mp.report.mospa) + ", AMOT " +
                    fmt(mp.report.amot) + ")"};
}

// ---- 8: qualitative ordering ----

Outcome ordering(const fs::path& workdir) {
  Stopwatch sw;
  pipeline::ExperimentConfig cfg;
  cfg.scenario.num_targets = 4;
  cfg.scenario.num_scans = 15;
  cfg.scenario.clutter.model = scenario::ClutterModel::k_distributed;
  cfg.seed = 1;
  cfg.dataset.scr_db = {0.0};
  cfg.dataset.runs = 16;
  cfg.train.learning_rate = 1e-2;
  cfg.train.epochs_step1 = 10;
  cfg.train.epochs_step2 = 10;
  cfg.scr_db = {0.0};
  cfg.runs = 100;
  cfg.methods = {nemp::Mode::mp, nemp::Mode::mp_nn, nemp::Mode::nemp};

  const fs::path dir = workdir / "ordering";
  fs::create_directories(dir);
  std::ofstream log(dir / "log.txt");
  pipeline::cmd_gen_dataset(cfg, dir / "dataset", log);
  const auto tr = pipeline::cmd_train(cfg, dir / "dataset", dir / "classifier.bin", dir / "loss_curve.csv", log);
  const auto summary = pipeline::cmd_track(cfg, dir / "classifier.bin", dir / "sweep", false, log);
  pipeline::print_summary(log, summary);

  const auto get = [&](nemp::Mode m) {
    for (const auto& s : summary)
      if (s.method == m) return s;
    throw RuntimeError("method missing from summary");
  };
  const auto mp = get(nemp::Mode::mp), mpnn = get(nemp::Mode::mp_nn), ne = get(nemp::Mode::nemp);
  const double t = sw.seconds();
  const bool mospa_order = ne.mospa <= mpnn.mospa && mpnn.mospa <= mp.mospa;
  const bool amot_gain = ne.amot >= mp.amot + 0.1;
  const bool pass = mospa_order && amot_gain && t < 600.0;
  return {pass, std::to_string(cfg.runs) + " runs at 0 dB, classifier val acc " + fmt(tr.val_accuracy, 3) +
                    "; MOSPA NEMP " + fmt(ne.mospa) + ", MP-NN " + fmt(mpnn.mospa) + ", MP " + fmt(mp.mospa) +
                    (mospa_order ? " (ordered)" : " (NOT ordered)") + "; AMOT NEMP " + fmt(ne.amot) + " vs MP " +
                    fmt(mp.amot) + " (gain " + fmt(ne.amot - mp.amot, 3) + "); " + fmt(t, 4) + " s"};
}

// ---- 9: determinism ----

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw RuntimeError("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& workdir) {
  pipeline::ExperimentConfig cfg;
  cfg.seed = 9;
  cfg.scr_db = {-4.0, 4.0};
  cfg.runs = 3;
  cfg.methods = {nemp::Mode::mp, nemp::Mode::mp_nn, nemp::Mode::nemp};
  const fs::path dir = workdir / "determinism";
  fs::create_directories(dir);
  nn::Classifier model(cfg.network_config());
  model.init(9);
  nn::save_weights((dir / "classifier.bin").string(), model);

  std::ofstream log(dir / "log.txt");
  for (const char* sub : {"a", "b"}) pipeline::cmd_track(cfg, dir / "classifier.bin", dir / sub, true, log);
  std::vector<std::string> differ;
  std::size_t bytes = 0;
  for (const char* f : {"results.csv", "summary.csv", "per_scan.csv", "tracks.csv", "diagnostics.jsonl", "config.ini"}) {
    const auto a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
    bytes += a.size();
    if (a != b) differ.emplace_back(f);
  }
  std::string detail = "6 output files, " + std::to_string(bytes) + " bytes compared, ";
  if (differ.empty()) detail += "identical";
  for (const auto& f : differ) detail += "differs: " + f + " ";
  return {differ.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string workdir = "acceptance_run";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "scratch directory for pipeline artifacts");
  app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome(const fs::path&)>>> criteria{
      {"evidence algebra", evidence_algebra},
      {"BP vs enumeration", bp_oracle},
      {"Kalman update", kalman},
      {"gradient check", gradients},
      {"CFAR calibration", cfar},
      {"OSPA properties", ospa_properties},
      {"neutral classifier", neutrality},
      {"qualitative ordering", ordering},
      {"determinism", determinism}};
  const std::set<int> selected(only.begin(), only.end());

  fs::create_directories(workdir);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second(workdir);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
