#pragma once

// The experiment driver's subcommands; the CLI is a thin wrapper.

#include "camtt/io/config.hpp"
#include "camtt/io/csv.hpp"
#include "camtt/io/dataset.hpp"
#include "camtt/pipeline/experiment.hpp"

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace camtt::pipeline {

namespace fs = std::filesystem;

inline void write_effective_config(const fs::path& path, const ExperimentConfig& cfg) {
  auto os = io::open_output(path.string());
  io::write_config(os, cfg);
  io::check_written(os, path.string());
}

/// Simulates and labels the dataset scenes into `dir`.
inline io::ClassCounts cmd_gen_dataset(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  cfg.validate();
  const auto samples = generate_dataset(cfg);
  io::write_dataset(dir, samples, cfg);
  write_effective_config(dir / "config.ini", cfg);
  const auto c = io::class_counts(samples);
  log << "dataset: " << samples.size() << " samples, " << c.target << " target, " << c.clutter << " clutter -> "
      << dir.string() << '\n';
  return c;
}

/// Trains on the dataset in `dataset_dir`; writes weights and the loss curve.
inline nn::TrainResult cmd_train(const ExperimentConfig& cfg, const fs::path& dataset_dir, const fs::path& weights,
                                 const fs::path& curve, std::ostream& log) {
  cfg.validate();
  const auto samples = io::load_dataset(dataset_dir);
  if (!samples.empty() && (samples.front().patch.rows() != static_cast<std::size_t>(cfg.detector.patch_range_bins) ||
                           samples.front().patch.cols() != static_cast<std::size_t>(cfg.detector.patch_doppler_bins)))
    throw ConfigError("dataset patch shape differs from the detector patch configuration");
  nn::Classifier model(cfg.network_config());
  const auto res = train_classifier(model, samples, cfg);

  if (weights.has_parent_path()) fs::create_directories(weights.parent_path());
  nlohmann::json extra;
  extra["samples"] = samples.size();
  extra["train_count"] = res.train_count;
  extra["val_count"] = res.val_count;
  extra["positive_weight"] = res.positive_weight;
  nn::save_weights(weights.string(), model, extra);

  if (curve.has_parent_path()) fs::create_directories(curve.parent_path());
  auto os = io::open_output(curve.string());
  io::write_loss_curve(os, res.curve);
  io::check_written(os, curve.string());

  log << "trained on " << res.train_count << " samples (" << res.val_count << " validation), "
      << res.curve.size() << " epochs\n";
  log << std::setprecision(6) << "validation BCE " << res.val_loss << ", accuracy " << res.val_accuracy
      << "; training accuracy " << res.train_accuracy << '\n';
  log << "weights -> " << weights.string() << '\n';
  return res;
}

/// Monte Carlo sweep over SCR and methods. Writes results.csv, summary.csv,
/// per_scan.csv and config.ini into `out`; with `verbose` also tracks.csv and
/// diagnostics.jsonl.
inline std::vector<SummaryRow> cmd_track(const ExperimentConfig& cfg, const std::optional<fs::path>& weights,
                                         const fs::path& out, bool verbose, std::ostream& log) {
  cfg.validate();
  const bool needs_model = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](nemp::Mode m) { return m != nemp::Mode::mp; });
  std::optional<nn::Classifier> model;
  if (needs_model) {
    if (!weights) throw ConfigError("methods MP-NN and NEMP need --weights");
    if (!fs::exists(*weights)) throw RuntimeError("weights file not found: " + weights->string());
    model = nn::load_weights(weights->string());
    const auto& a = model->config();
    if (a.rows != static_cast<std::size_t>(cfg.detector.patch_range_bins) ||
        a.cols != static_cast<std::size_t>(cfg.detector.patch_doppler_bins))
      throw ConfigError("classifier patch shape differs from the detector patch configuration");
  }

  const auto rows = run_sweep(cfg, model ? &*model : nullptr, verbose);
  const auto summary = summarize(rows);
  fs::create_directories(out);

  const auto write = [&](const std::string& name, auto&& fn) {
    const auto path = (out / name).string();
    auto os = io::open_output(path);
    fn(os);
    io::check_written(os, path);
  };
  write("results.csv", [&](std::ostream& os) { io::write_results(os, rows); });
  write("summary.csv", [&](std::ostream& os) { io::write_summary(os, summary); });
  write("per_scan.csv", [&](std::ostream& os) { io::write_per_scan(os, rows); });
  write_effective_config(out / "config.ini", cfg);
  if (verbose) {
    write("tracks.csv", [&](std::ostream& os) { io::write_tracks(os, rows); });
    write("diagnostics.jsonl", [&](std::ostream& os) {
      for (const auto& r : rows)
        for (auto d : r.diagnostics) {
          d["scr_db"] = r.scr_db;
          d["run"] = r.run;
          os << d.dump() << '\n';
        }
    });
  }
  log << rows.size() << " runs tracked -> " << out.string() << '\n';
  return summary;
}

/// Aligned text table of a summary.
inline void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  const auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    if (v) s << std::fixed << std::setprecision(3) << *v;
    else s << "-";
    return s.str();
  };
  os << std::left << std::setw(7) << "method" << std::right << std::setw(8) << "SCR dB" << std::setw(6) << "runs"
     << std::setw(9) << "MOSPA" << std::setw(9) << "AMOT" << std::setw(7) << "IDS" << std::setw(7) << "Frag"
     << std::setw(8) << "FN" << std::setw(8) << "FP" << std::setw(10) << "RMSE r" << std::setw(10) << "RMSE v" << '\n';
  for (const auto& s : rows)
    os << std::left << std::setw(7) << nemp::to_string(s.method) << std::right << std::fixed << std::setprecision(1)
       << std::setw(8) << s.scr_db << std::setw(6) << s.runs << std::setprecision(3) << std::setw(9) << s.mospa
       << std::setw(9) << s.amot << std::setprecision(2) << std::setw(7) << s.ids << std::setw(7) << s.frag
       << std::setw(8) << s.false_negatives << std::setw(8) << s.false_positives << std::setw(10)
       << opt(s.rmse_position) << std::setw(10) << opt(s.rmse_velocity) << '\n';
  os.unsetf(std::ios::fixed);
}

/// Re-aggregates results.csv of a finished sweep, prints the table and
/// rewrites summary.csv next to it.
inline std::vector<SummaryRow> cmd_report(const fs::path& out, std::ostream& log) {
  const auto results = out / "results.csv";
  if (!fs::exists(results)) throw RuntimeError("no results.csv in " + out.string());
  const auto rows = io::load_results(results.string());
  const auto summary = summarize(rows);
  print_summary(log, summary);
  const auto path = (out / "summary.csv").string();
  auto os = io::open_output(path);
  io::write_summary(os, summary);
  io::check_written(os, path);
  return summary;
}

}  // namespace camtt::pipeline
