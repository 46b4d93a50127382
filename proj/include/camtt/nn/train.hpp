#pragma once

#include "camtt/core.hpp"
#include "camtt/nn/layers.hpp"
#include "camtt/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace camtt::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  int epochs_step1 = 50;
  int epochs_step2 = 50;
  int patience = 10;            // epochs without validation improvement
  double val_fraction = 0.2;    // 0 disables the split and early stopping
  bool class_weighting = true;
  std::uint64_t seed = 1;

  void validate() const {
    require(learning_rate > 0.0, "nn.learning_rate must be > 0");
    require(momentum >= 0.0 && momentum < 1.0, "nn.momentum must lie in [0,1)");
    require(batch_size >= 1, "nn.batch_size must be >= 1");
    require(epochs_step1 >= 0 && epochs_step2 >= 0, "nn epochs must be >= 0");
    require(patience >= 1, "nn.patience must be >= 1");
    require(val_fraction >= 0.0 && val_fraction < 1.0, "nn.val_fraction must lie in [0,1)");
  }
};

struct EpochRecord {
  int step = 1;
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
  double train_accuracy = 0.0;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
  double positive_weight = 1.0;
};

/// Training view over externally owned patches.
struct TrainingSet {
  std::vector<const Grid<double>*> patches;
  std::vector<double> labels;
  std::vector<double> beliefs;  // association belief fed to the classifier

  [[nodiscard]] std::size_t size() const { return labels.size(); }
};

namespace detail {

inline double accuracy(const std::vector<double>& p, const std::vector<double>& y) {
  if (p.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += (p[i] >= 0.5) == (y[i] >= 0.5);
  return static_cast<double>(ok) / static_cast<double>(p.size());
}

inline void check_finite(double loss, int step, int epoch, std::size_t batch) {
  if (std::isfinite(loss)) return;
  std::ostringstream os;
  os << "training diverged: loss=" << loss << " at step " << step << ", epoch " << epoch << ", batch " << batch;
  throw RuntimeError(os.str());
}

/// Stratified split of indices into (train, val).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split(const std::vector<double>& labels,
                                                                           double fraction, Rng& rng) {
  std::vector<std::size_t> pos, neg, tr, va;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] >= 0.5 ? pos : neg).push_back(i);
  for (auto* group : {&pos, &neg}) {
    std::shuffle(group->begin(), group->end(), rng);
    const auto nv = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(group->size())));
    va.insert(va.end(), group->begin(), group->begin() + static_cast<long>(nv));
    tr.insert(tr.end(), group->begin() + static_cast<long>(nv), group->end());
  }
  std::sort(tr.begin(), tr.end());
  std::sort(va.begin(), va.end());
  return {tr, va};
}

}  // namespace detail

/// Two-step training. Step 1 fits the feature extractor through a temporary
/// head on patches alone; step 2 fits extractor and classifier jointly on
/// (features, belief). Each step keeps the weights with the best validation
/// loss.
inline TrainResult train(Classifier& model, const TrainingSet& data, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.size();
  if (n == 0) throw ConfigError("training set is empty");
  if (data.patches.size() != n || data.beliefs.size() != n) throw SizeError("training set columns differ in length");
  const auto npos = static_cast<std::size_t>(std::count_if(data.labels.begin(), data.labels.end(), [](double y) { return y >= 0.5; }));
  if (npos == 0 || npos == n) throw ConfigError("training set must contain both classes");

  TrainResult res;
  Rng rng = make_rng(cfg.seed, 0x74726e00ULL);
  auto [tr, va] = cfg.val_fraction > 0.0 ? detail::split(data.labels, cfg.val_fraction, rng)
                                         : std::pair{std::vector<std::size_t>(n), std::vector<std::size_t>{}};
  if (cfg.val_fraction == 0.0) std::iota(tr.begin(), tr.end(), std::size_t{0});
  res.train_count = tr.size();
  res.val_count = va.size();

  std::size_t tr_pos = 0;
  for (std::size_t i : tr) tr_pos += data.labels[i] >= 0.5;
  const double pos_w = cfg.class_weighting && tr_pos > 0
                           ? static_cast<double>(tr.size() - tr_pos) / static_cast<double>(tr_pos)
                           : 1.0;
  res.positive_weight = pos_w;

  Sequential head = build_head(model.config());
  init_weights(head, rng);
  const std::size_t nf = model.config().features;

  const auto gather = [&](const std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    std::vector<const Grid<double>*> p;
    std::vector<double> y, b, w;
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = idx[k];
      p.push_back(data.patches[i]);
      y.push_back(data.labels[i]);
      b.push_back(data.beliefs[i]);
      w.push_back(data.labels[i] >= 0.5 ? pos_w : 1.0);
    }
    return std::tuple{p, y, b, w};
  };

  // Predictions for a fixed index list in eval mode, in chunks.
  const auto predict = [&](int step, const std::vector<std::size_t>& idx) {
    std::vector<double> out, ys, ws;
    for (std::size_t lo = 0; lo < idx.size(); lo += 64) {
      auto [p, y, b, w] = gather(idx, lo, std::min(idx.size(), lo + 64));
      Tensor f = model.cnn().forward(patch_batch(p, model.config()), false);
      Tensor q = step == 1 ? head.forward(f, false) : model.mlp().forward(mlp_input(f, b), false);
      out.insert(out.end(), q.data.begin(), q.data.end());
      ys.insert(ys.end(), y.begin(), y.end());
      ws.insert(ws.end(), w.begin(), w.end());
    }
    return std::tuple{out, ys, ws};
  };

  for (int step = 1; step <= 2; ++step) {
    const int epochs = step == 1 ? cfg.epochs_step1 : cfg.epochs_step2;
    if (epochs == 0) continue;
    SgdMomentum opt(cfg.learning_rate, cfg.momentum);
    std::vector<Param> params = model.cnn().params("cnn.");
    for (auto& p : (step == 1 ? head : model.mlp()).params("top.")) params.push_back(p);

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_state = model.state(), best_head = snapshot(head);
    int stale = 0;
    std::vector<std::size_t> order = tr;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double sum = 0.0;
      std::size_t batches = 0;
      for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
        auto [p, y, b, w] = gather(order, lo, std::min(order.size(), lo + cfg.batch_size));
        for (auto& q : params) q.tensor->zero_grad();
        Tensor f = model.cnn().forward(patch_batch(p, model.config()), true);
        Tensor out = step == 1 ? head.forward(f, true) : model.mlp().forward(mlp_input(f, b), true);
        const double loss = bce_loss(out.data, y, w);
        detail::check_finite(loss, step, epoch, batches);
        Tensor g(out.shape);
        g.data = bce_grad(out.data, y, w);
        Tensor df;
        if (step == 1) {
          df = head.backward(g);
        } else {
          Tensor dx = model.mlp().backward(g);
          df = Tensor({dx.dim(0), nf});
          for (std::size_t r = 0; r < dx.dim(0); ++r)
            std::copy_n(dx.data.begin() + static_cast<long>(r * (nf + 1)), nf, df.data.begin() + static_cast<long>(r * nf));
        }
        model.cnn().backward(df);
        opt.step(params);
        sum += loss;
        ++batches;
      }
      EpochRecord rec;
      rec.step = step;
      rec.epoch = epoch;
      rec.train_loss = sum / static_cast<double>(std::max<std::size_t>(batches, 1));
      double monitor = rec.train_loss;
      if (!va.empty()) {
        auto [pv, yv, wv] = predict(step, va);
        rec.val_loss = bce_loss(pv, yv, wv);
        rec.val_accuracy = detail::accuracy(pv, yv);
        detail::check_finite(rec.val_loss, step, epoch, 0);
        monitor = rec.val_loss;
      }
      res.curve.push_back(rec);
      if (monitor < best) {
        best = monitor;
        best_state = model.state();
        best_head = snapshot(head);
        stale = 0;
      } else if (!va.empty() && ++stale >= cfg.patience) {
        break;
      }
    }
    if (!va.empty()) {
      model.restore_state(best_state);
      restore(head, best_head);
    }
  }

  if (!va.empty()) {
    auto [pv, yv, wv] = predict(2, va);
    res.val_loss = bce_loss(pv, yv, wv);
    res.val_accuracy = detail::accuracy(pv, yv);
  }
  auto [pt, yt, wt] = predict(2, tr);
  res.train_accuracy = detail::accuracy(pt, yt);
  return res;
}

}  // namespace camtt::nn
