#pragma once

#include "camtt/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace camtt::nn {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using ConstMapRM = Eigen::Map<const MatrixRM>;

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty unless the tensor is a trainable parameter

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0) : shape(std::move(s)), data(count(shape), fill) {}

  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }
  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] std::size_t dim(std::size_t i) const { return shape.at(i); }
  void zero_grad() { grad.assign(data.size(), 0.0); }
};

inline std::string shape_string(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

struct Param {
  std::string name;
  Tensor* tensor;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, bool train) = 0;
  virtual Tensor backward(const Tensor& dy) = 0;
  /// Output shape for a given input shape (batch dimension included).
  virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
  virtual std::vector<Param> params() { return {}; }
  /// Non-trainable persistent state (BatchNorm running statistics).
  virtual std::vector<Param> buffers() { return {}; }
  [[nodiscard]] virtual std::string kind() const = 0;
};

namespace detail {
inline void expect_rank(const Tensor& x, std::size_t rank, const std::string& layer) {
  if (x.shape.size() != rank)
    throw StructuralError(layer + " expects a rank-" + std::to_string(rank) + " input, got " + shape_string(x.shape));
}
}  // namespace detail

/// 2-D convolution, stride 1, zero "same" padding, odd kernel sizes.
/// Input and output are (batch, channels, rows, cols).
class Conv2d : public Layer {
 public:
  Conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw)
      : in_(in_ch), out_(out_ch), kh_(kh), kw_(kw), weight_({out_ch, in_ch, kh, kw}), bias_({out_ch}) {
    if (kh % 2 == 0 || kw % 2 == 0) throw StructuralError("Conv2d kernel sizes must be odd");
    weight_.zero_grad();
    bias_.zero_grad();
  }

  void init(Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in_ * kh_ * kw_));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : weight_.data) w = u(rng);
    std::fill(bias_.data.begin(), bias_.data.end(), 0.0);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4 || in[1] != in_)
      throw StructuralError("Conv2d(" + std::to_string(in_) + "->" + std::to_string(out_) + ") got input " +
                            shape_string(in));
    return {in[0], out_, in[2], in[3]};
  }

  Tensor forward(const Tensor& x, bool) override {
    const auto os = output_shape(x.shape);
    const std::size_t b = x.dim(0), h = x.dim(2), w = x.dim(3), hw = h * w, ck = in_ * kh_ * kw_;
    in_shape_ = x.shape;
    cols_.assign(b * ck * hw, 0.0);
    Tensor y(os);
    ConstMapRM wm(weight_.data.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(ck));
    for (std::size_t n = 0; n < b; ++n) {
      double* col = cols_.data() + n * ck * hw;
      im2col(x.data.data() + n * in_ * hw, h, w, col);
      ConstMapRM cm(col, static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(hw));
      MapRM ym(y.data.data() + n * out_ * hw, static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(hw));
      ym.noalias() = wm * cm;
      for (std::size_t o = 0; o < out_; ++o) ym.row(static_cast<Eigen::Index>(o)).array() += bias_.data[o];
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    const std::size_t b = in_shape_[0], h = in_shape_[2], w = in_shape_[3], hw = h * w, ck = in_ * kh_ * kw_;
    Tensor dx(in_shape_);
    ConstMapRM wm(weight_.data.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(ck));
    MapRM dw(weight_.grad.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(ck));
    std::vector<double> dcol(ck * hw);
    for (std::size_t n = 0; n < b; ++n) {
      ConstMapRM cm(cols_.data() + n * ck * hw, static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(hw));
      ConstMapRM g(dy.data.data() + n * out_ * hw, static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(hw));
      dw.noalias() += g * cm.transpose();
      for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += g.row(static_cast<Eigen::Index>(o)).sum();
      MapRM dc(dcol.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(hw));
      dc.noalias() = wm.transpose() * g;
      col2im(dcol.data(), h, w, dx.data.data() + n * in_ * hw);
    }
    return dx;
  }

  std::vector<Param> params() override { return {{"weight", &weight_}, {"bias", &bias_}}; }
  [[nodiscard]] std::string kind() const override { return "conv2d"; }

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  void im2col(const double* x, std::size_t h, std::size_t w, double* col) const {
    const long ph = static_cast<long>(kh_ / 2), pw = static_cast<long>(kw_ / 2);
    std::size_t row = 0;
    for (std::size_t c = 0; c < in_; ++c)
      for (std::size_t a = 0; a < kh_; ++a)
        for (std::size_t e = 0; e < kw_; ++e, ++row) {
          double* dst = col + row * h * w;
          for (std::size_t r = 0; r < h; ++r) {
            const long rr = static_cast<long>(r) + static_cast<long>(a) - ph;
            if (rr < 0 || rr >= static_cast<long>(h)) continue;
            const double* src = x + (c * h + static_cast<std::size_t>(rr)) * w;
            const long shift = static_cast<long>(e) - pw;
            const long lo = std::max(0L, -shift), hi = std::min(static_cast<long>(w), static_cast<long>(w) - shift);
            for (long q = lo; q < hi; ++q) dst[r * w + static_cast<std::size_t>(q)] = src[q + shift];
          }
        }
  }

  void col2im(const double* col, std::size_t h, std::size_t w, double* dx) const {
    const long ph = static_cast<long>(kh_ / 2), pw = static_cast<long>(kw_ / 2);
    std::size_t row = 0;
    for (std::size_t c = 0; c < in_; ++c)
      for (std::size_t a = 0; a < kh_; ++a)
        for (std::size_t e = 0; e < kw_; ++e, ++row) {
          const double* src = col + row * h * w;
          for (std::size_t r = 0; r < h; ++r) {
            const long rr = static_cast<long>(r) + static_cast<long>(a) - ph;
            if (rr < 0 || rr >= static_cast<long>(h)) continue;
            double* dst = dx + (c * h + static_cast<std::size_t>(rr)) * w;
            const long shift = static_cast<long>(e) - pw;
            const long lo = std::max(0L, -shift), hi = std::min(static_cast<long>(w), static_cast<long>(w) - shift);
            for (long q = lo; q < hi; ++q) dst[q + shift] += src[r * w + static_cast<std::size_t>(q)];
          }
        }
  }

  std::size_t in_, out_, kh_, kw_;
  Tensor weight_, bias_;
  std::vector<std::size_t> in_shape_;
  std::vector<double> cols_;
};

/// Per-channel batch normalization over (batch, rows, cols).
class BatchNorm2d : public Layer {
 public:
  explicit BatchNorm2d(std::size_t channels, double momentum = 0.1, double eps = 1e-5)
      : c_(channels), momentum_(momentum), eps_(eps), gamma_({channels}, 1.0), beta_({channels}, 0.0),
        running_mean_({channels}, 0.0), running_var_({channels}, 1.0) {
    gamma_.zero_grad();
    beta_.zero_grad();
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4 || in[1] != c_) throw StructuralError("BatchNorm2d(" + std::to_string(c_) + ") got input " + shape_string(in));
    return in;
  }

  Tensor forward(const Tensor& x, bool train) override {
    output_shape(x.shape);
    const std::size_t b = x.dim(0), hw = x.dim(2) * x.dim(3);
    const double n = static_cast<double>(b * hw);
    Tensor y(x.shape);
    shape_ = x.shape;
    train_ = train;
    xhat_.assign(x.size(), 0.0);
    inv_std_.assign(c_, 0.0);
    for (std::size_t c = 0; c < c_; ++c) {
      double mean, var;
      if (train) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < b; ++k) {
          const double* p = x.data.data() + (k * c_ + c) * hw;
          for (std::size_t i = 0; i < hw; ++i) s += p[i];
        }
        mean = s / n;
        for (std::size_t k = 0; k < b; ++k) {
          const double* p = x.data.data() + (k * c_ + c) * hw;
          for (std::size_t i = 0; i < hw; ++i) s2 += (p[i] - mean) * (p[i] - mean);
        }
        var = s2 / n;
        const double unbiased = n > 1.0 ? s2 / (n - 1.0) : var;
        running_mean_.data[c] = (1.0 - momentum_) * running_mean_.data[c] + momentum_ * mean;
        running_var_.data[c] = (1.0 - momentum_) * running_var_.data[c] + momentum_ * unbiased;
      } else {
        mean = running_mean_.data[c];
        var = running_var_.data[c];
      }
      const double inv = 1.0 / std::sqrt(var + eps_);
      inv_std_[c] = inv;
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t off = (k * c_ + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          const double xh = (x.data[off + i] - mean) * inv;
          xhat_[off + i] = xh;
          y.data[off + i] = gamma_.data[c] * xh + beta_.data[c];
        }
      }
    }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    const std::size_t b = shape_[0], hw = shape_[2] * shape_[3];
    const double n = static_cast<double>(b * hw);
    Tensor dx(shape_);
    for (std::size_t c = 0; c < c_; ++c) {
      double sdy = 0.0, sdyx = 0.0;
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t off = (k * c_ + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          sdy += dy.data[off + i];
          sdyx += dy.data[off + i] * xhat_[off + i];
        }
      }
      gamma_.grad[c] += sdyx;
      beta_.grad[c] += sdy;
      const double g = gamma_.data[c] * inv_std_[c];
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t off = (k * c_ + c) * hw;
        for (std::size_t i = 0; i < hw; ++i) {
          if (train_) dx.data[off + i] = g * (dy.data[off + i] - sdy / n - xhat_[off + i] * sdyx / n);
          else dx.data[off + i] = g * dy.data[off + i];
        }
      }
    }
    return dx;
  }

  std::vector<Param> params() override { return {{"gamma", &gamma_}, {"beta", &beta_}}; }
  std::vector<Param> buffers() override { return {{"running_mean", &running_mean_}, {"running_var", &running_var_}}; }
  [[nodiscard]] std::string kind() const override { return "batchnorm2d"; }

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  Tensor& running_mean() { return running_mean_; }
  Tensor& running_var() { return running_var_; }
  [[nodiscard]] double eps() const { return eps_; }

 private:
  std::size_t c_;
  double momentum_, eps_;
  Tensor gamma_, beta_, running_mean_, running_var_;
  std::vector<std::size_t> shape_;
  std::vector<double> xhat_, inv_std_;
  bool train_ = false;
};

class ReLU : public Layer {
 public:
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override { return in; }
  Tensor forward(const Tensor& x, bool) override {
    Tensor y(x.shape);
    mask_.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x.data[i] > 0.0 || std::isnan(x.data[i])) { y.data[i] = x.data[i]; mask_[i] = 1; }
    return y;
  }
  Tensor backward(const Tensor& dy) override {
    Tensor dx(dy.shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = mask_[i] ? dy.data[i] : 0.0;
    return dx;
  }
  [[nodiscard]] std::string kind() const override { return "relu"; }
  /// Active units of the last forward pass.
  [[nodiscard]] const std::vector<unsigned char>& mask() const { return mask_; }

 private:
  std::vector<unsigned char> mask_;
};

class Sigmoid : public Layer {
 public:
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override { return in; }
  Tensor forward(const Tensor& x, bool) override {
    Tensor y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = 1.0 / (1.0 + std::exp(-x.data[i]));
    out_ = y.data;
    return y;
  }
  Tensor backward(const Tensor& dy) override {
    Tensor dx(dy.shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = dy.data[i] * out_[i] * (1.0 - out_[i]);
    return dx;
  }
  [[nodiscard]] std::string kind() const override { return "sigmoid"; }

 private:
  std::vector<double> out_;
};

/// Non-overlapping max pooling with window (ph, pw).
class MaxPool2d : public Layer {
 public:
  MaxPool2d(std::size_t ph, std::size_t pw) : ph_(ph), pw_(pw) {}

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4 || in[2] % ph_ != 0 || in[3] % pw_ != 0)
      throw StructuralError("MaxPool2d(" + std::to_string(ph_) + "x" + std::to_string(pw_) + ") cannot pool " +
                            shape_string(in));
    return {in[0], in[1], in[2] / ph_, in[3] / pw_};
  }

  Tensor forward(const Tensor& x, bool) override {
    const auto os = output_shape(x.shape);
    in_shape_ = x.shape;
    Tensor y(os);
    argmax_.assign(y.size(), 0);
    const std::size_t h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    for (std::size_t plane = 0; plane < x.dim(0) * x.dim(1); ++plane)
      for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c) {
          std::size_t best = plane * h * w + r * ph_ * w + c * pw_;
          for (std::size_t a = 0; a < ph_; ++a)
            for (std::size_t e = 0; e < pw_; ++e) {
              const std::size_t idx = plane * h * w + (r * ph_ + a) * w + c * pw_ + e;
              if (x.data[idx] > x.data[best] || std::isnan(x.data[idx])) best = idx;
            }
          const std::size_t o = (plane * oh + r) * ow + c;
          y.data[o] = x.data[best];
          argmax_[o] = best;
        }
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    Tensor dx(in_shape_);
    for (std::size_t o = 0; o < dy.size(); ++o) dx.data[argmax_[o]] += dy.data[o];
    return dx;
  }
  [[nodiscard]] std::string kind() const override { return "maxpool2d"; }
  /// Winning input index per output of the last forward pass.
  [[nodiscard]] const std::vector<std::size_t>& argmax() const { return argmax_; }

 private:
  std::size_t ph_, pw_;
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
};

class Flatten : public Layer {
 public:
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.empty()) throw StructuralError("Flatten needs a batch dimension");
    return {in[0], Tensor::count(in) / std::max<std::size_t>(in[0], 1)};
  }
  Tensor forward(const Tensor& x, bool) override {
    in_shape_ = x.shape;
    Tensor y = x;
    y.grad.clear();
    y.shape = output_shape(x.shape);
    return y;
  }
  Tensor backward(const Tensor& dy) override {
    Tensor dx = dy;
    dx.shape = in_shape_;
    return dx;
  }
  [[nodiscard]] std::string kind() const override { return "flatten"; }

 private:
  std::vector<std::size_t> in_shape_;
};

/// y = x W^T + b with x (batch, in).
class Linear : public Layer {
 public:
  Linear(std::size_t in, std::size_t out) : in_(in), out_(out), weight_({out, in}), bias_({out}) {
    weight_.zero_grad();
    bias_.zero_grad();
  }

  void init(Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in_));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : weight_.data) w = u(rng);
    std::fill(bias_.data.begin(), bias_.data.end(), 0.0);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 2 || in[1] != in_)
      throw StructuralError("Linear(" + std::to_string(in_) + "->" + std::to_string(out_) + ") got input " +
                            shape_string(in));
    return {in[0], out_};
  }

  Tensor forward(const Tensor& x, bool) override {
    const auto os = output_shape(x.shape);
    x_ = x.data;
    Tensor y(os);
    const auto b = static_cast<Eigen::Index>(x.dim(0));
    ConstMapRM xm(x.data.data(), b, static_cast<Eigen::Index>(in_));
    ConstMapRM wm(weight_.data.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    MapRM ym(y.data.data(), b, static_cast<Eigen::Index>(out_));
    ym.noalias() = xm * wm.transpose();
    for (Eigen::Index r = 0; r < b; ++r)
      for (std::size_t o = 0; o < out_; ++o) ym(r, static_cast<Eigen::Index>(o)) += bias_.data[o];
    return y;
  }

  Tensor backward(const Tensor& dy) override {
    const auto b = static_cast<Eigen::Index>(dy.dim(0));
    ConstMapRM xm(x_.data(), b, static_cast<Eigen::Index>(in_));
    ConstMapRM wm(weight_.data.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    ConstMapRM g(dy.data.data(), b, static_cast<Eigen::Index>(out_));
    MapRM dw(weight_.grad.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    dw.noalias() += g.transpose() * xm;
    for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += g.col(static_cast<Eigen::Index>(o)).sum();
    Tensor dx({dy.dim(0), in_});
    MapRM dxm(dx.data.data(), b, static_cast<Eigen::Index>(in_));
    dxm.noalias() = g * wm;
    return dx;
  }

  std::vector<Param> params() override { return {{"weight", &weight_}, {"bias", &bias_}}; }
  [[nodiscard]] std::string kind() const override { return "linear"; }

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  Tensor weight_, bias_;
  std::vector<double> x_;
};

/// Ordered stack of layers.
class Sequential {
 public:
  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto p = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *p;
    layers_.push_back(std::move(p));
    return ref;
  }

  Tensor forward(const Tensor& x, bool train) {
    Tensor h = x;
    for (auto& l : layers_) h = l->forward(h, train);
    return h;
  }

  Tensor backward(const Tensor& dy) {
    Tensor g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  std::vector<std::size_t> output_shape(std::vector<std::size_t> in) const {
    for (const auto& l : layers_) in = l->output_shape(in);
    return in;
  }

  std::vector<Param> params(const std::string& prefix = "") {
    std::vector<Param> out;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      for (auto& p : layers_[i]->params()) out.push_back({prefix + std::to_string(i) + "." + p.name, p.tensor});
    return out;
  }

  std::vector<Param> buffers(const std::string& prefix = "") {
    std::vector<Param> out;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      for (auto& p : layers_[i]->buffers()) out.push_back({prefix + std::to_string(i) + "." + p.name, p.tensor});
    return out;
  }

  void zero_grad() {
    for (auto& p : params()) p.tensor->zero_grad();
  }

  [[nodiscard]] std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// ---- Loss ----

inline constexpr double kProbClamp = 1e-7;

/// Mean (optionally weighted) binary cross-entropy; 0 for an empty batch.
inline double bce_loss(const std::vector<double>& pred, const std::vector<double>& labels,
                       const std::vector<double>& weights = {}) {
  if (pred.size() != labels.size()) throw SizeError("prediction and label counts differ");
  if (!weights.empty() && weights.size() != pred.size()) throw SizeError("weight count differs from predictions");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kProbClamp, 1.0 - kProbClamp);
    const double w = weights.empty() ? 1.0 : weights[i];
    s -= w * (labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p));
  }
  return s / static_cast<double>(pred.size());
}

/// dLoss/dpred for bce_loss; zero where the clamp is active.
inline std::vector<double> bce_grad(const std::vector<double>& pred, const std::vector<double>& labels,
                                    const std::vector<double>& weights = {}) {
  std::vector<double> g(pred.size(), 0.0);
  const auto n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    g[i] = -w * (labels[i] / p - (1.0 - labels[i]) / (1.0 - p)) / n;
  }
  return g;
}

// ---- Optimizer ----

class SgdMomentum {
 public:
  SgdMomentum(double lr, double momentum) : lr_(lr), momentum_(momentum) {}

  void step(const std::vector<Param>& params) {
    if (velocity_.size() != params.size()) {
      velocity_.clear();
      for (const auto& p : params) velocity_.emplace_back(p.tensor->size(), 0.0);
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      Tensor& t = *params[k].tensor;
      auto& v = velocity_[k];
      for (std::size_t i = 0; i < t.size(); ++i) {
        v[i] = momentum_ * v[i] + t.grad[i];
        t.data[i] -= lr_ * v[i];
      }
    }
  }

  void reset() { velocity_.clear(); }

 private:
  double lr_, momentum_;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace camtt::nn
