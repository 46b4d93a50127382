#pragma once

// Long-format CSV outputs of the experiment driver and their loaders.
// Numbers use the shortest round-trip representation; absent optional
// values are empty fields.

#include "camtt/core.hpp"
#include "camtt/io/config.hpp"
#include "camtt/nn/train.hpp"
#include "camtt/pipeline/experiment.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace camtt::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw RuntimeError("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(std::istream& is, const std::string& origin) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw RuntimeError(origin + ": empty CSV");
  t.header = split_csv_line(line);
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size())
      throw RuntimeError(origin + ": line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw RuntimeError("cannot open CSV file: " + path);
  return read_csv(is, path);
}

inline void expect_header(const CsvTable& t, const std::string& header, const std::string& origin) {
  if (t.header != split_csv_line(header)) throw RuntimeError(origin + ": unexpected CSV header");
}

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

template <class T>
T field(const std::string& s, const std::string& origin) {
  try {
    return parse_number<T>(s, origin);
  } catch (const ConfigError& e) {
    throw RuntimeError(e.what());
  }
}

inline std::optional<double> optional_field(const std::string& s, const std::string& origin) {
  if (s.empty()) return std::nullopt;
  return field<double>(s, origin);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open output file: " + path);
  return os;
}

inline void check_written(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) throw RuntimeError("failed writing " + path);
}

// ---- results.csv: one row per (method, SCR, run) ----

inline constexpr const char* kResultsHeader =
    "method,scr_db,run,seed,mospa,amot,ids,frag,false_negatives,false_positives,truth_presences,rmse_position,"
    "rmse_velocity";

inline void write_results(std::ostream& os, const std::vector<pipeline::ResultRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.report;
    os << nemp::to_string(r.method) << ',' << format_double(r.scr_db) << ',' << r.run << ',' << r.seed << ','
       << format_double(m.mospa) << ',' << format_double(m.amot) << ',' << m.ids << ',' << m.frag << ','
       << m.false_negatives << ',' << m.false_positives << ',' << m.truth_presences << ',' << cell(m.rmse_position)
       << ',' << cell(m.rmse_velocity) << '\n';
  }
}

inline std::vector<pipeline::ResultRow> parse_results(const CsvTable& t, const std::string& origin) {
  expect_header(t, kResultsHeader, origin);
  std::vector<pipeline::ResultRow> out;
  for (const auto& c : t.rows) {
    pipeline::ResultRow r;
    try {
      r.method = nemp::mode_from_string(c[0]);
    } catch (const ConfigError& e) {
      throw RuntimeError(origin + ": " + e.what());
    }
    r.scr_db = field<double>(c[1], origin);
    r.run = field<int>(c[2], origin);
    r.seed = field<std::uint64_t>(c[3], origin);
    r.report.mospa = field<double>(c[4], origin);
    r.report.amot = field<double>(c[5], origin);
    r.report.ids = field<int>(c[6], origin);
    r.report.frag = field<int>(c[7], origin);
    r.report.false_negatives = field<int>(c[8], origin);
    r.report.false_positives = field<int>(c[9], origin);
    r.report.truth_presences = field<int>(c[10], origin);
    r.report.rmse_position = optional_field(c[11], origin);
    r.report.rmse_velocity = optional_field(c[12], origin);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<pipeline::ResultRow> load_results(const std::string& path) {
  return parse_results(read_csv(path), path);
}

// ---- summary.csv: mean over runs per (method, SCR) ----

inline constexpr const char* kSummaryHeader =
    "method,scr_db,runs,mospa,amot,ids,frag,false_negatives,false_positives,rmse_position,rmse_velocity";

inline void write_summary(std::ostream& os, const std::vector<pipeline::SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& s : rows)
    os << nemp::to_string(s.method) << ',' << format_double(s.scr_db) << ',' << s.runs << ',' << format_double(s.mospa)
       << ',' << format_double(s.amot) << ',' << format_double(s.ids) << ',' << format_double(s.frag) << ','
       << format_double(s.false_negatives) << ',' << format_double(s.false_positives) << ','
       << cell(s.rmse_position) << ',' << cell(s.rmse_velocity) << '\n';
}

inline std::vector<pipeline::SummaryRow> parse_summary(const CsvTable& t, const std::string& origin) {
  expect_header(t, kSummaryHeader, origin);
  std::vector<pipeline::SummaryRow> out;
  for (const auto& c : t.rows) {
    pipeline::SummaryRow s;
    try {
      s.method = nemp::mode_from_string(c[0]);
    } catch (const ConfigError& e) {
      throw RuntimeError(origin + ": " + e.what());
    }
    s.scr_db = field<double>(c[1], origin);
    s.runs = field<int>(c[2], origin);
    s.mospa = field<double>(c[3], origin);
    s.amot = field<double>(c[4], origin);
    s.ids = field<double>(c[5], origin);
    s.frag = field<double>(c[6], origin);
    s.false_negatives = field<double>(c[7], origin);
    s.false_positives = field<double>(c[8], origin);
    s.rmse_position = optional_field(c[9], origin);
    s.rmse_velocity = optional_field(c[10], origin);
    out.push_back(s);
  }
  return out;
}

inline std::vector<pipeline::SummaryRow> load_summary(const std::string& path) {
  return parse_summary(read_csv(path), path);
}

// ---- per_scan.csv: OSPA and RMSE series ----

inline constexpr const char* kPerScanHeader =
    "method,scr_db,run,scan,ospa,rmse_position,rmse_velocity,num_measurements,num_kept,num_confirmed";

struct PerScanRow {
  nemp::Mode method = nemp::Mode::mp;
  double scr_db = 0.0;
  int run = 0;
  pipeline::PerScan values;
};

inline void write_per_scan(std::ostream& os, const std::vector<pipeline::ResultRow>& rows) {
  os << kPerScanHeader << '\n';
  for (const auto& r : rows)
    for (const auto& p : r.per_scan)
      os << nemp::to_string(r.method) << ',' << format_double(r.scr_db) << ',' << r.run << ',' << p.scan << ','
         << format_double(p.ospa) << ',' << cell(p.rmse_position) << ',' << cell(p.rmse_velocity) << ','
         << p.num_measurements << ',' << p.num_kept << ',' << p.num_confirmed << '\n';
}

inline std::vector<PerScanRow> parse_per_scan(const CsvTable& t, const std::string& origin) {
  expect_header(t, kPerScanHeader, origin);
  std::vector<PerScanRow> out;
  for (const auto& c : t.rows) {
    PerScanRow r;
    try {
      r.method = nemp::mode_from_string(c[0]);
    } catch (const ConfigError& e) {
      throw RuntimeError(origin + ": " + e.what());
    }
    r.scr_db = field<double>(c[1], origin);
    r.run = field<int>(c[2], origin);
    r.values.scan = field<int>(c[3], origin);
    r.values.ospa = field<double>(c[4], origin);
    r.values.rmse_position = optional_field(c[5], origin);
    r.values.rmse_velocity = optional_field(c[6], origin);
    r.values.num_measurements = field<int>(c[7], origin);
    r.values.num_kept = field<int>(c[8], origin);
    r.values.num_confirmed = field<int>(c[9], origin);
    out.push_back(r);
  }
  return out;
}

// ---- tracks.csv: track history (verbose runs) ----

inline constexpr const char* kTracksHeader =
    "method,scr_db,run,scan,track_id,status,range,range_rate,range_accel,p_visible";

inline void write_tracks(std::ostream& os, const std::vector<pipeline::ResultRow>& rows) {
  os << kTracksHeader << '\n';
  for (const auto& r : rows)
    for (const auto& h : r.history)
      os << nemp::to_string(r.method) << ',' << format_double(r.scr_db) << ',' << r.run << ',' << h.scan << ','
         << h.track_id << ',' << mp::to_string(h.status) << ',' << format_double(h.mean(0)) << ','
         << format_double(h.mean(1)) << ',' << format_double(h.mean(2)) << ',' << format_double(h.p_visible) << '\n';
}

// ---- loss_curve.csv ----

inline constexpr const char* kLossCurveHeader = "step,epoch,train_loss,val_loss,val_accuracy";

inline std::string nan_cell(double v) { return std::isnan(v) ? "" : format_double(v); }

inline void write_loss_curve(std::ostream& os, const std::vector<nn::EpochRecord>& curve) {
  os << kLossCurveHeader << '\n';
  for (const auto& e : curve)
    os << e.step << ',' << e.epoch << ',' << format_double(e.train_loss) << ',' << nan_cell(e.val_loss) << ','
       << nan_cell(e.val_accuracy) << '\n';
}

inline std::vector<nn::EpochRecord> parse_loss_curve(const CsvTable& t, const std::string& origin) {
  expect_header(t, kLossCurveHeader, origin);
  std::vector<nn::EpochRecord> out;
  for (const auto& c : t.rows) {
    nn::EpochRecord e;
    e.step = field<int>(c[0], origin);
    e.epoch = field<int>(c[1], origin);
    e.train_loss = field<double>(c[2], origin);
    e.val_loss = optional_field(c[3], origin).value_or(std::numeric_limits<double>::quiet_NaN());
    e.val_accuracy = optional_field(c[4], origin).value_or(std::numeric_limits<double>::quiet_NaN());
    out.push_back(e);
  }
  return out;
}

}  // namespace camtt::io
