#pragma once

// INI experiment configuration: every key maps onto one field of
// ExperimentConfig; unknown sections or keys are rejected.

#include "camtt/core.hpp"
#include "camtt/pipeline/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace camtt::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  T v{};
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto r = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(what + ": cannot parse '" + text + "' as a number");
  return v;
}

inline bool parse_bool(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(what + ": cannot parse '" + text + "' as a boolean");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Comma-separated values; an item "a:step:b" expands to a, a+step, ..., b.
inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number<double>(item, what));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(what + ": range '" + item + "' must read start:step:stop");
    const double a = parse_number<double>(item.substr(0, c1), what);
    const double step = parse_number<double>(item.substr(c1 + 1, c2 - c1 - 1), what);
    const double b = parse_number<double>(item.substr(c2 + 1), what);
    if (!(step > 0.0) || b < a) throw ConfigError(what + ": range '" + item + "' needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

inline std::vector<nemp::Mode> parse_methods(const std::string& text) {
  std::vector<nemp::Mode> out;
  for (const auto& item : split_list(text)) {
    const auto m = nemp::mode_from_string(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw ConfigError("methods: empty list");
  return out;
}

/// Name -> (setter, getter) for every configurable field.
class KeyTable {
 public:
  struct Entry {
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
  };

  void add(const std::string& key, Entry e) {
    order_.push_back(key);
    entries_[key] = std::move(e);
  }

  void bind(const std::string& key, double& f) {
    add(key, {[&f, key](const std::string& v) { f = parse_number<double>(v, key); },
              [&f] { return format_double(f); }});
  }
  void bind(const std::string& key, int& f) {
    add(key, {[&f, key](const std::string& v) { f = parse_number<int>(v, key); },
              [&f] { return std::to_string(f); }});
  }
  template <class U>
    requires(std::is_unsigned_v<U> && !std::is_same_v<U, bool>)
  void bind(const std::string& key, U& f) {
    add(key, {[&f, key](const std::string& v) { f = parse_number<U>(v, key); },
              [&f] { return std::to_string(f); }});
  }
  void bind(const std::string& key, bool& f) {
    add(key, {[&f, key](const std::string& v) { f = parse_bool(v, key); }, [&f] { return f ? "true" : "false"; }});
  }
  void bind(const std::string& key, std::string& f) {
    add(key, {[&f](const std::string& v) { f = trim(v); }, [&f] { return f; }});
  }
  void bind(const std::string& key, std::vector<double>& f) {
    add(key, {[&f, key](const std::string& v) { f = parse_double_list(v, key); },
              [&f] {
                std::string s;
                for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + format_double(f[i]);
                return s;
              }});
  }

  void set(const std::string& key, const std::string& value) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second.set(value);
  }
  [[nodiscard]] std::string get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second.get();
  }
  [[nodiscard]] const std::vector<std::string>& keys() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
};

inline KeyTable key_table(pipeline::ExperimentConfig& c) {
  KeyTable t;
  auto& sc = c.scenario;
  t.bind("experiment.seed", c.seed);
  t.bind("experiment.out", c.out);
  t.bind("experiment.workers", c.workers);

  t.bind("sweep.scr", c.scr_db);
  t.bind("sweep.runs", c.runs);
  t.add("sweep.methods", {[&c](const std::string& v) { c.methods = parse_methods(v); },
                          [&c] {
                            std::string s;
                            for (std::size_t i = 0; i < c.methods.size(); ++i)
                              s += (i ? "," : "") + nemp::to_string(c.methods[i]);
                            return s;
                          }});

  t.bind("radar.prf", sc.radar.prf);
  t.bind("radar.carrier_frequency", sc.radar.carrier_frequency);
  t.bind("radar.range_bin_size", sc.radar.range_bin_size);
  t.bind("radar.range_offset", sc.radar.range_offset);
  t.bind("radar.num_range_bins", sc.radar.num_range_bins);
  t.bind("radar.pulses_per_scan", sc.radar.pulses_per_scan);

  t.add("clutter.model", {[&sc](const std::string& v) { sc.clutter.model = scenario::clutter_model_from_string(trim(v)); },
                          [&sc] { return scenario::to_string(sc.clutter.model); }});
  t.bind("clutter.shape", sc.clutter.shape);
  t.bind("clutter.mean_doppler", sc.clutter.mean_doppler);
  t.bind("clutter.spectral_width", sc.clutter.spectral_width);
  t.bind("clutter.texture_correlation", sc.clutter.texture_correlation);
  t.bind("clutter.scan_texture_correlation", sc.clutter.scan_texture_correlation);
  t.bind("clutter.range_texture_correlation", sc.clutter.range_texture_correlation);
  t.bind("clutter.mean_power", sc.clutter.mean_power);
  t.bind("clutter.noise_power", sc.clutter.noise_power);

  t.bind("scenario.num_scans", sc.num_scans);
  t.bind("scenario.scan_interval", sc.scan_interval);
  t.bind("scenario.sigma_accel", sc.sigma_accel);
  t.bind("scenario.num_targets", sc.num_targets);
  t.bind("scenario.range_min", sc.range_min);
  t.bind("scenario.range_max", sc.range_max);
  t.bind("scenario.doppler_min", sc.doppler_min);
  t.bind("scenario.doppler_max", sc.doppler_max);
  t.bind("scenario.radial_length_min", sc.radial_length_min);
  t.bind("scenario.radial_length_max", sc.radial_length_max);
  t.bind("scenario.rcs_correlation", sc.rcs_correlation);
  t.bind("scenario.rcs_log_sigma", sc.rcs_log_sigma);

  auto& d = c.detector;
  t.bind("detector.pfa", d.pfa);
  t.bind("detector.guard_cells", d.guard_cells);
  t.bind("detector.training_cells", d.training_cells);
  t.bind("detector.r_th", d.r_th);
  t.bind("detector.d_th", d.d_th);
  t.bind("detector.min_cluster_size", d.min_cluster_size);
  t.bind("detector.patch_range_bins", d.patch_range_bins);
  t.bind("detector.patch_doppler_bins", d.patch_doppler_bins);

  auto& tr = c.tracker;
  t.bind("tracker.range_std", tr.motion.range_std);
  t.bind("tracker.doppler_std", tr.motion.doppler_std);
  t.bind("tracker.pd_visible", tr.detection.pd_visible);
  t.bind("tracker.pd_invisible", tr.detection.pd_invisible);
  t.bind("tracker.pfa_prior", tr.detection.pfa_prior);
  t.bind("tracker.bp_tolerance", tr.bp.tolerance);
  t.bind("tracker.bp_max_iterations", tr.bp.max_iterations);
  t.bind("tracker.gate", tr.gate);
  t.bind("tracker.visibility_stay", tr.visibility_stay);
  t.bind("tracker.visibility_threshold", tr.visibility_threshold);
  t.bind("tracker.confirm_hits", tr.confirm_hits);
  t.bind("tracker.confirm_window", tr.confirm_window);
  t.bind("tracker.terminate_after", tr.terminate_after);
  t.bind("tracker.max_miss_streak", tr.max_miss_streak);
  t.bind("tracker.initial_visibility", tr.initial_visibility);
  t.bind("tracker.max_tracks", tr.max_tracks);
  t.bind("tracker.birth_clutter_belief", tr.birth_clutter_belief);
  t.bind("tracker.velocity_inflation", tr.velocity_inflation);
  t.bind("tracker.accel_std", tr.accel_std);

  t.bind("nemp.iterations", c.nemp.iterations);
  t.bind("nemp.suppression_threshold", c.nemp.suppression_threshold);

  auto& nn = c.train;
  t.bind("nn.learning_rate", nn.learning_rate);
  t.bind("nn.momentum", nn.momentum);
  t.bind("nn.batch_size", nn.batch_size);
  t.bind("nn.epochs_step1", nn.epochs_step1);
  t.bind("nn.epochs_step2", nn.epochs_step2);
  t.bind("nn.patience", nn.patience);
  t.bind("nn.val_fraction", nn.val_fraction);
  t.bind("nn.class_weighting", nn.class_weighting);

  t.bind("dataset.runs", c.dataset.runs);
  t.bind("dataset.scr", c.dataset.scr_db);
  t.bind("dataset.t_dist", c.dataset.labels.t_dist);
  t.bind("dataset.range_scale", c.dataset.labels.range_scale);
  t.bind("dataset.doppler_scale", c.dataset.labels.doppler_scale);

  t.bind("metrics.ospa_c", c.ospa_c);
  t.bind("metrics.ospa_p", c.ospa_p);
  t.bind("metrics.match_gate", c.match_gate);
  return t;
}

/// Applies "section.key=value" to the configuration.
inline void apply_override(pipeline::ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must read section.key=value");
  key_table(c).set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline void apply_ini(pipeline::ExperimentConfig& c, std::istream& is, const std::string& origin) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const KeyTable table = key_table(c);
  std::set<std::string> sections;
  for (const auto& k : table.keys()) sections.insert(k.substr(0, k.find('.')));
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(origin + ": key '" + section + "' outside a section");
    if (!sections.contains(section)) throw ConfigError(origin + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      try {
        table.set(section + "." + key, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
      }
    }
  }
}

inline pipeline::ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  pipeline::ExperimentConfig c;
  apply_ini(c, is, path);
  return c;
}

inline pipeline::ExperimentConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  pipeline::ExperimentConfig c;
  apply_ini(c, is, "<config>");
  return c;
}

/// Effective configuration in INI form; loading it reproduces `c`.
inline void write_config(std::ostream& os, const pipeline::ExperimentConfig& c) {
  auto copy = c;
  const KeyTable table = key_table(copy);
  std::string section;
  for (const auto& key : table.keys()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      os << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << table.get(key) << '\n';
  }
}

}  // namespace camtt::io
