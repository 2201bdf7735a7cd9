#pragma once

// Additive attention pooling over a state sequence:
//   score_t = v . tanh(W s_t),  alpha = softmax(score),  context = sum alpha_t s_t

#include <cmath>
#include <stdexcept>

#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/rng.hpp"

namespace wsd::nn {

struct AttentionParams {
  Matrix W;  // A x D
  Vector v;  // A

  AttentionParams() = default;
  AttentionParams(Eigen::Index state_dim, Eigen::Index attn_dim)
      : W(Matrix::Zero(attn_dim, state_dim)), v(Vector::Zero(attn_dim)) {}

  static AttentionParams glorot(Eigen::Index state_dim, Eigen::Index attn_dim, Rng& rng) {
    AttentionParams p(state_dim, attn_dim);
    const double lw = std::sqrt(6.0 / static_cast<double>(state_dim + attn_dim));
    const double lv = std::sqrt(6.0 / static_cast<double>(attn_dim + 1));
    for (Eigen::Index c = 0; c < p.W.cols(); ++c)
      for (Eigen::Index r = 0; r < p.W.rows(); ++r) p.W(r, c) = rng.uniform(-lw, lw);
    for (Eigen::Index r = 0; r < p.v.size(); ++r) p.v(r) = rng.uniform(-lv, lv);
    return p;
  }
};

struct AttentionTrace {
  Matrix states;   // D x L, every column a valid position (padding is not stored)
  Matrix u;        // A x L, tanh(W s_t)
  Vector scores;   // L
  Vector weights;  // L, softmax over valid positions
  Vector context;  // D
};

// `states` has `max_len` columns of which the first `valid_length` are real.
// Padding columns get weight exactly 0 and do not touch the context.
inline AttentionTrace attention_forward(const Matrix& states,
                                        Eigen::Index valid_length,
                                        const AttentionParams& p) {
  if (valid_length < 1) throw InputError("empty sequence");
  if (valid_length > states.cols())
    throw std::invalid_argument("attention_forward: valid_length exceeds sequence");
  if (states.rows() != p.W.cols() || p.v.size() != p.W.rows())
    throw std::invalid_argument("attention_forward: shape mismatch");
  AttentionTrace tr;
  tr.states = states.leftCols(valid_length);
  tr.u = (p.W * tr.states).array().tanh();
  tr.scores = tr.u.transpose() * p.v;
  const double m = tr.scores.maxCoeff();
  tr.weights = (tr.scores.array() - m).exp();
  tr.weights /= tr.weights.sum();
  tr.context = tr.states * tr.weights;
  return tr;
}

// Weights over all `max_len` positions, zero past valid_length.
inline Vector padded_weights(const AttentionTrace& tr, Eigen::Index max_len) {
  Vector w = Vector::Zero(max_len);
  w.head(tr.weights.size()) = tr.weights;
  return w;
}

// Accumulates into `grads`; returns dLoss/dstates (D x L).
inline Matrix attention_backward(const AttentionTrace& tr, const AttentionParams& p,
                                 const Vector& d_context, AttentionParams& grads) {
  const Vector d_alpha = tr.states.transpose() * d_context;
  Matrix d_states = d_context * tr.weights.transpose();
  const double mean = tr.weights.dot(d_alpha);
  const Vector d_score = tr.weights.cwiseProduct((d_alpha.array() - mean).matrix());
  grads.v.noalias() += tr.u * d_score;
  const Matrix d_pre =
      ((p.v * d_score.transpose()).array() * (1.0 - tr.u.array().square())).matrix();
  grads.W.noalias() += d_pre * tr.states.transpose();
  d_states.noalias() += p.W.transpose() * d_pre;
  return d_states;
}

}  // namespace wsd::nn
