#pragma once

#include "camtt/core.hpp"
#include "camtt/nn/layers.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace camtt::nn {

struct CnnConfig {
  std::size_t rows = 5;
  std::size_t cols = 512;
  std::vector<std::size_t> channels{8, 16, 16};
  std::size_t kernel_rows = 3;
  std::size_t kernel_cols = 5;
  std::size_t pool_cols = 4;
  std::vector<std::size_t> hidden{64, 32};
  std::size_t features = 8;
  std::vector<std::size_t> mlp_hidden{32, 16};
  std::vector<std::size_t> head_hidden{16};  // step-one temporary head

  [[nodiscard]] std::size_t flat_size() const {
    std::size_t c = cols;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (c % pool_cols != 0) throw StructuralError("patch width is not divisible by the pooling factors");
      c /= pool_cols;
    }
    return channels.back() * rows * c;
  }

  void validate() const {
    if (rows == 0 || cols == 0 || channels.empty() || features == 0 || pool_cols == 0)
      throw StructuralError("CNN configuration has empty dimensions");
    (void)flat_size();
  }
};

inline nlohmann::json to_json(const CnnConfig& c) {
  return {{"rows", c.rows},       {"cols", c.cols},           {"channels", c.channels},
          {"kernel_rows", c.kernel_rows}, {"kernel_cols", c.kernel_cols}, {"pool_cols", c.pool_cols},
          {"hidden", c.hidden},   {"features", c.features},   {"mlp_hidden", c.mlp_hidden},
          {"head_hidden", c.head_hidden}};
}

inline CnnConfig cnn_config_from_json(const nlohmann::json& j) {
  CnnConfig c;
  c.rows = j.at("rows");
  c.cols = j.at("cols");
  c.channels = j.at("channels").get<std::vector<std::size_t>>();
  c.kernel_rows = j.at("kernel_rows");
  c.kernel_cols = j.at("kernel_cols");
  c.pool_cols = j.at("pool_cols");
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.features = j.at("features");
  c.mlp_hidden = j.at("mlp_hidden").get<std::vector<std::size_t>>();
  c.head_hidden = j.at("head_hidden").get<std::vector<std::size_t>>();
  return c;
}

/// conv+BN+ReLU+pool blocks, flatten, ReLU hidden layers, sigmoid features.
inline Sequential build_cnn(const CnnConfig& c) {
  c.validate();
  Sequential s;
  std::size_t in = 1;
  for (std::size_t ch : c.channels) {
    s.add<Conv2d>(in, ch, c.kernel_rows, c.kernel_cols);
    s.add<BatchNorm2d>(ch);
    s.add<ReLU>();
    s.add<MaxPool2d>(1, c.pool_cols);
    in = ch;
  }
  s.add<Flatten>();
  std::size_t width = c.flat_size();
  for (std::size_t h : c.hidden) {
    s.add<Linear>(width, h);
    s.add<ReLU>();
    width = h;
  }
  s.add<Linear>(width, c.features);
  s.add<Sigmoid>();
  return s;
}

inline Sequential build_dense(std::size_t in, const std::vector<std::size_t>& hidden) {
  Sequential s;
  std::size_t width = in;
  for (std::size_t h : hidden) {
    s.add<Linear>(width, h);
    s.add<ReLU>();
    width = h;
  }
  s.add<Linear>(width, 1);
  s.add<Sigmoid>();
  return s;
}

/// Features plus association belief into the classification probability.
inline Sequential build_mlp(const CnnConfig& c) { return build_dense(c.features + 1, c.mlp_hidden); }

/// Temporary head used to pre-train the feature extractor.
inline Sequential build_head(const CnnConfig& c) { return build_dense(c.features, c.head_hidden); }

inline void init_weights(Sequential& s, Rng& rng) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (auto* conv = dynamic_cast<Conv2d*>(&s.layer(i))) conv->init(rng);
    else if (auto* lin = dynamic_cast<Linear*>(&s.layer(i))) lin->init(rng);
  }
}

/// Flat copy of every parameter and buffer, used for snapshots.
inline std::vector<double> snapshot(Sequential& s) {
  std::vector<double> out;
  auto all = s.params();
  auto buf = s.buffers();
  all.insert(all.end(), buf.begin(), buf.end());
  for (const auto& p : all) out.insert(out.end(), p.tensor->data.begin(), p.tensor->data.end());
  return out;
}

inline void restore(Sequential& s, const std::vector<double>& state) {
  auto all = s.params();
  auto buf = s.buffers();
  all.insert(all.end(), buf.begin(), buf.end());
  std::size_t off = 0;
  for (const auto& p : all) {
    if (off + p.tensor->size() > state.size()) throw SizeError("snapshot is shorter than the network");
    std::copy_n(state.begin() + static_cast<long>(off), p.tensor->size(), p.tensor->data.begin());
    off += p.tensor->size();
  }
  if (off != state.size()) throw SizeError("snapshot is longer than the network");
}

/// Patches in [0,255] as a (batch, 1, rows, cols) tensor scaled to [0,1].
inline Tensor patch_batch(std::span<const Grid<double>* const> patches, const CnnConfig& c) {
  Tensor x({patches.size(), 1, c.rows, c.cols});
  for (std::size_t b = 0; b < patches.size(); ++b) {
    const auto& p = *patches[b];
    if (p.rows() != c.rows || p.cols() != c.cols)
      throw StructuralError("patch is " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) +
                            ", network expects " + std::to_string(c.rows) + "x" + std::to_string(c.cols));
    for (std::size_t i = 0; i < p.size(); ++i) x.data[b * p.size() + i] = p.values()[i] / 255.0;
  }
  return x;
}

/// Features concatenated with the association belief, (batch, features + 1).
inline Tensor mlp_input(const Tensor& features, std::span<const double> beliefs) {
  const std::size_t b = features.dim(0), f = features.dim(1);
  if (beliefs.size() != b) throw SizeError("belief count differs from feature batch");
  Tensor x({b, f + 1});
  for (std::size_t n = 0; n < b; ++n) {
    std::copy_n(features.data.begin() + static_cast<long>(n * f), f, x.data.begin() + static_cast<long>(n * (f + 1)));
    x.data[n * (f + 1) + f] = beliefs[n];
  }
  return x;
}

/// Feature extractor plus classifier. Forward passes cache activations, so
/// one instance must not be shared between threads; copy it instead.
class Classifier {
 public:
  explicit Classifier(CnnConfig cfg = {}) : cfg_(std::move(cfg)), cnn_(build_cnn(cfg_)), mlp_(build_mlp(cfg_)) {}

  Classifier(const Classifier& o) : Classifier(o.cfg_) { restore_state(const_cast<Classifier&>(o).state()); }
  Classifier& operator=(const Classifier& o) {
    if (this != &o) {
      cfg_ = o.cfg_;
      cnn_ = build_cnn(cfg_);
      mlp_ = build_mlp(cfg_);
      restore_state(const_cast<Classifier&>(o).state());
    }
    return *this;
  }
  Classifier(Classifier&&) = default;
  Classifier& operator=(Classifier&&) = default;

  void init(std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x6e6e696eULL);
    init_weights(cnn_, rng);
    init_weights(mlp_, rng);
  }

  [[nodiscard]] const CnnConfig& config() const { return cfg_; }
  Sequential& cnn() { return cnn_; }
  Sequential& mlp() { return mlp_; }

  /// Eval-mode features, one row per patch.
  Tensor features(std::span<const Grid<double>* const> patches) {
    if (patches.empty()) return Tensor({0, cfg_.features});
    return cnn_.forward(patch_batch(patches, cfg_), false);
  }

  std::vector<double> classify(const Tensor& features, std::span<const double> beliefs) {
    if (beliefs.empty()) return {};
    return mlp_.forward(mlp_input(features, beliefs), false).data;
  }

  std::vector<double> state() {
    auto a = snapshot(cnn_);
    auto b = snapshot(mlp_);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  void restore_state(const std::vector<double>& s) {
    const std::size_t n = snapshot(cnn_).size();
    if (s.size() < n) throw SizeError("classifier state is too short");
    restore(cnn_, std::vector<double>(s.begin(), s.begin() + static_cast<long>(n)));
    restore(mlp_, std::vector<double>(s.begin() + static_cast<long>(n), s.end()));
  }

 private:
  CnnConfig cfg_;
  Sequential cnn_;
  Sequential mlp_;
};

// ---- Weights file: magic, header length, JSON header, float64 LE blob ----

inline constexpr char kWeightsMagic[8] = {'C', 'A', 'M', 'T', 'T', 'N', 'N', '1'};

namespace detail {
inline void put_u64_le(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_u64_le(std::istream& is) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(is.get())) << (8 * i);
  return v;
}
inline void put_f64_le(std::ostream& os, double d) { put_u64_le(os, std::bit_cast<std::uint64_t>(d)); }
inline double get_f64_le(std::istream& is) { return std::bit_cast<double>(get_u64_le(is)); }

inline nlohmann::json tensor_index(Sequential& s, const std::string& prefix, std::size_t& offset) {
  nlohmann::json arr = nlohmann::json::array();
  auto all = s.params(prefix);
  auto buf = s.buffers(prefix);
  all.insert(all.end(), buf.begin(), buf.end());
  for (const auto& p : all) {
    arr.push_back({{"name", p.name}, {"shape", p.tensor->shape}, {"offset", offset}});
    offset += p.tensor->size();
  }
  return arr;
}
}  // namespace detail

inline void save_weights(const std::string& path, Classifier& c, const nlohmann::json& extra = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw RuntimeError("cannot open weights file for writing: " + path);
  std::size_t offset = 0;
  nlohmann::json header;
  header["format"] = "camtt-classifier";
  header["version"] = 1;
  header["architecture"] = to_json(c.config());
  header["tensors"] = detail::tensor_index(c.cnn(), "cnn.", offset);
  auto mlp = detail::tensor_index(c.mlp(), "mlp.", offset);
  for (auto& t : mlp) header["tensors"].push_back(t);
  header["count"] = offset;
  if (!extra.is_null()) header["training"] = extra;
  const std::string h = header.dump();
  os.write(kWeightsMagic, 8);
  detail::put_u64_le(os, h.size());
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (double v : c.state()) detail::put_f64_le(os, v);
  if (!os) throw RuntimeError("failed writing weights file: " + path);
}

inline Classifier load_weights(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw RuntimeError("cannot open weights file: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kWeightsMagic, 8) != 0) throw RuntimeError("not a classifier weights file: " + path);
  const std::uint64_t hlen = detail::get_u64_le(is);
  std::string h(hlen, '\0');
  is.read(h.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw RuntimeError("truncated weights header: " + path);
  const auto header = nlohmann::json::parse(h);
  Classifier c(cnn_config_from_json(header.at("architecture")));
  const std::size_t count = header.at("count");
  std::vector<double> state(count);
  for (double& v : state) v = detail::get_f64_le(is);
  if (!is) throw RuntimeError("truncated weights blob: " + path);
  c.restore_state(state);
  return c;
}

}  // namespace camtt::nn
