#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wsd/linalg.hpp"
#include "wsd/nn/model.hpp"

namespace wsd::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Vector> m;
  std::vector<Vector> v;
  std::uint64_t step = 0;
};

// Adam with bias correction:
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
//   x -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
// Tensors flagged non-trainable are skipped. `params` and `grads` must list
// tensors of identical shapes in identical order.
inline void adam_step(std::vector<TensorRef> params, const std::vector<TensorRef>& grads,
                      AdamState& state, const AdamOptions& opt) {
  if (params.size() != grads.size())
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& t : params) {
      state.m.push_back(Vector::Zero(t.size()));
      state.v.push_back(Vector::Zero(t.size()));
    }
  }
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam_step: optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != grads[k].size())
      throw std::invalid_argument("adam_step: shape mismatch for " + params[k].name);
    if (!params[k].trainable) continue;
    auto x = params[k].flat();
    const auto g = grads[k].flat();
    auto& m = state.m[k];
    auto& v = state.v[k];
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g.cwiseProduct(g);
    x.array() -= opt.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.epsilon);
  }
}

inline void adam_step(ModelParams& params, ModelParams& grads, AdamState& state,
                      const AdamOptions& opt) {
  adam_step(params.tensors(), grads.tensors(), state, opt);
}

}  // namespace wsd::nn
