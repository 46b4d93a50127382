// camtt: dataset generation, classifier training, tracking sweeps, reports.

#include "camtt/io/config.hpp"
#include "camtt/pipeline/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace camtt;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string scr;
  std::optional<int> runs;
  std::string methods;
  std::string out;
  std::string weights;
  std::string dataset;
  std::vector<std::string> set;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "INI experiment configuration");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.set, "override, section.key=value (repeatable)");
  cmd->add_flag("--verbose", o.verbose, "extra output");
}

/// Config file, then --set overrides, then the dedicated flags.
pipeline::ExperimentConfig resolve(const Options& o, bool dataset_context) {
  pipeline::ExperimentConfig c = o.config.empty() ? pipeline::ExperimentConfig{} : io::load_config(o.config);
  for (const auto& s : o.set) io::apply_override(c, s);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  if (!o.scr.empty()) (dataset_context ? c.dataset.scr_db : c.scr_db) = io::parse_double_list(o.scr, "--scr");
  if (o.runs) (dataset_context ? c.dataset.runs : c.runs) = *o.runs;
  if (!o.methods.empty()) c.methods = io::parse_methods(o.methods);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classification-aided multi-target tracking experiments"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-dataset", "simulate and label classifier training patches");
  add_common(gen, o);
  gen->add_option("--scr", o.scr, "dataset SCR list in dB (a,b,... or start:step:stop)");
  gen->add_option("--runs", o.runs, "scenes per SCR");
  gen->add_option("--dataset", o.dataset, "dataset directory to write (default: <out>/dataset)");

  auto* train = app.add_subcommand("train", "two-step classifier training");
  add_common(train, o);
  train->add_option("--dataset", o.dataset, "dataset directory (default: <out>/dataset)");
  train->add_option("--weights", o.weights, "weights file to write (default: <out>/classifier.bin)");

  auto* track = app.add_subcommand("track", "Monte Carlo tracking sweep");
  add_common(track, o);
  track->add_option("--scr", o.scr, "SCR list in dB (a,b,... or start:step:stop)");
  track->add_option("--runs", o.runs, "Monte Carlo runs per SCR");
  track->add_option("--methods", o.methods, "methods, from MP,MP-NN,NEMP");
  track->add_option("--weights", o.weights, "classifier weights (needed by MP-NN and NEMP)");

  auto* report = app.add_subcommand("report", "aggregate results.csv of a sweep");
  report->add_option("--out", o.out, "sweep output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const auto cfg = resolve(o, true);
      const fs::path dir = o.dataset.empty() ? fs::path(cfg.out) / "dataset" : fs::path(o.dataset);
      pipeline::cmd_gen_dataset(cfg, dir, std::cout);
    } else if (*train) {
      const auto cfg = resolve(o, false);
      const fs::path out = cfg.out;
      const fs::path dataset = o.dataset.empty() ? out / "dataset" : fs::path(o.dataset);
      const fs::path weights = o.weights.empty() ? out / "classifier.bin" : fs::path(o.weights);
      pipeline::cmd_train(cfg, dataset, weights, out / "loss_curve.csv", std::cout);
    } else if (*track) {
      const auto cfg = resolve(o, false);
      std::optional<fs::path> weights;
      if (!o.weights.empty()) weights = fs::path(o.weights);
      const auto summary = pipeline::cmd_track(cfg, weights, cfg.out, o.verbose, std::cout);
      pipeline::print_summary(std::cout, summary);
    } else if (*report) {
      pipeline::cmd_report(o.out, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
