#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "wsd/error.hpp"
#include "wsd/nn/adam.hpp"
#include "wsd/nn/model.hpp"
#include "wsd/rng.hpp"

namespace wsd::nn {

struct LabeledSequence {
  EncodedSequence seq;
  int label = 0;
};

struct FitOptions {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  AdamOptions adam;
  std::uint64_t seed = 1;
  // Called after each epoch with (epoch index, mean training loss); returning
  // false stops training early.
  std::function<bool(std::size_t, double, const ModelParams&)> on_epoch;
};

struct FitResult {
  ModelParams params;
  std::vector<double> loss_history;  // mean per-example loss of each epoch
  std::size_t epochs_run = 0;
};

inline void add_into(ModelParams& acc, ModelParams& g) {
  auto a = acc.tensors();
  auto b = g.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) a[k].flat() += b[k].flat();
}

// Mini-batch training with dropout active. Sequential and fully determined by
// (initial params, data order, options.seed).
inline FitResult fit(ModelParams init, const std::vector<LabeledSequence>& data,
                     const FitOptions& opt) {
  if (data.empty()) throw InputError("training set is empty");
  if (opt.batch_size == 0) throw InputError("batch size must be positive");
  FitResult result;
  result.params = std::move(init);
  ModelParams& p = result.params;
  p.check();

  Rng order_rng(mix_seed(opt.seed, 2));
  Rng dropout_rng(mix_seed(opt.seed, 3));
  AdamState adam;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + opt.batch_size);
      ModelParams grads = zeros_like(p);
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = data[order[k]];
        const DropoutMasks masks = draw_masks(p, ex.seq.valid_length, dropout_rng);
        const ForwardTrace tr = forward(p, ex.seq, &masks);
        const double l = bce_loss(tr.probability, ex.label);
        if (!std::isfinite(l) || !std::isfinite(tr.probability)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch + 1 << ", batch " << batch_index + 1;
          throw NumericError(msg.str());
        }
        epoch_loss += l;
        ModelParams g = backward(tr, ex.label, p);
        add_into(grads, g);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& t : grads.tensors()) t.flat() *= scale;
      adam_step(p, grads, adam, opt.adam);
    }
    const double mean = epoch_loss / static_cast<double>(data.size());
    result.loss_history.push_back(mean);
    result.epochs_run = epoch + 1;
    if (opt.on_epoch && !opt.on_epoch(epoch, mean, p)) break;
  }
  return result;
}

inline double mean_loss(const ModelParams& p, const std::vector<LabeledSequence>& data) {
  double total = 0.0;
  for (const auto& ex : data) total += loss(p, ex.seq, ex.label);
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

}  // namespace wsd::nn
