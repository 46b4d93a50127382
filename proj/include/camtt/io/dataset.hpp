#pragma once

// Dataset directory: patches.bin (float32 little-endian, sample-major,
// row-major patches), labels.csv and dataset.json.

#include "camtt/core.hpp"
#include "camtt/io/config.hpp"
#include "camtt/io/csv.hpp"
#include "camtt/pipeline/experiment.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace camtt::io {

inline constexpr const char* kLabelsHeader = "index,label,belief,scr_db,run,scan,range,doppler";

struct ClassCounts {
  std::size_t target = 0;
  std::size_t clutter = 0;
};

inline ClassCounts class_counts(const std::vector<pipeline::Sample>& samples) {
  ClassCounts c;
  for (const auto& s : samples) (s.label == 1 ? c.target : c.clutter)++;
  return c;
}

inline void put_f32_le(std::ostream& os, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

inline float get_f32_le(const unsigned char* p) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(u);
}

inline void write_dataset(const std::filesystem::path& dir, const std::vector<pipeline::Sample>& samples,
                          const pipeline::ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  const auto rows = static_cast<std::size_t>(cfg.detector.patch_range_bins);
  const auto cols = static_cast<std::size_t>(cfg.detector.patch_doppler_bins);

  const auto bin = (dir / "patches.bin").string();
  auto pb = open_output(bin);
  for (const auto& s : samples) {
    if (s.patch.rows() != rows || s.patch.cols() != cols) throw SizeError("sample patch shape differs from config");
    for (double v : s.patch.values()) put_f32_le(pb, static_cast<float>(v));
  }
  check_written(pb, bin);

  const auto csv = (dir / "labels.csv").string();
  auto lb = open_output(csv);
  lb << kLabelsHeader << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    lb << i << ',' << s.label << ',' << format_double(s.belief) << ',' << format_double(s.scr_db) << ',' << s.run << ','
       << s.scan << ',' << format_double(s.range) << ',' << format_double(s.doppler) << '\n';
  }
  check_written(lb, csv);

  const auto counts = class_counts(samples);
  nlohmann::json meta;
  meta["format"] = "camtt-dataset";
  meta["version"] = 1;
  meta["count"] = samples.size();
  meta["patch_rows"] = rows;
  meta["patch_cols"] = cols;
  meta["patch_encoding"] = "float32-le";
  meta["targets"] = counts.target;
  meta["clutter"] = counts.clutter;
  meta["seed"] = cfg.seed;
  meta["runs"] = cfg.dataset.runs;
  meta["scr_db"] = cfg.dataset.scr_db;
  const auto js = (dir / "dataset.json").string();
  auto jo = open_output(js);
  jo << meta.dump(2) << '\n';
  check_written(jo, js);
}

inline std::vector<pipeline::Sample> load_dataset(const std::filesystem::path& dir) {
  const auto js = (dir / "dataset.json").string();
  std::ifstream ji(js);
  if (!ji) throw RuntimeError("cannot open dataset metadata: " + js);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ji);
  } catch (const nlohmann::json::exception& e) {
    throw RuntimeError(js + ": " + e.what());
  }
  if (meta.value("format", "") != "camtt-dataset") throw RuntimeError(js + ": not a dataset description");
  const std::size_t n = meta.at("count"), rows = meta.at("patch_rows"), cols = meta.at("patch_cols");

  const auto csv = (dir / "labels.csv").string();
  const auto table = read_csv(csv);
  expect_header(table, kLabelsHeader, csv);
  if (table.rows.size() != n) throw RuntimeError(csv + ": row count differs from dataset.json");

  const auto bin = (dir / "patches.bin").string();
  std::ifstream pb(bin, std::ios::binary);
  if (!pb) throw RuntimeError("cannot open patch file: " + bin);
  std::vector<unsigned char> raw(n * rows * cols * 4);
  pb.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!pb || pb.peek() != std::char_traits<char>::eof()) throw RuntimeError(bin + ": size differs from dataset.json");

  std::vector<pipeline::Sample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = table.rows[i];
    auto& s = out[i];
    if (field<std::size_t>(c[0], csv) != i) throw RuntimeError(csv + ": indices are not consecutive");
    s.label = field<int>(c[1], csv);
    if (s.label != 0 && s.label != 1) throw RuntimeError(csv + ": labels must be 0 or 1");
    s.belief = field<double>(c[2], csv);
    s.scr_db = field<double>(c[3], csv);
    s.run = field<int>(c[4], csv);
    s.scan = field<int>(c[5], csv);
    s.range = field<double>(c[6], csv);
    s.doppler = field<double>(c[7], csv);
    s.patch = Grid<double>(rows, cols);
    const unsigned char* p = raw.data() + i * rows * cols * 4;
    for (std::size_t k = 0; k < rows * cols; ++k) s.patch.values()[k] = get_f32_le(p + 4 * k);
  }
  return out;
}

}  // namespace camtt::io
