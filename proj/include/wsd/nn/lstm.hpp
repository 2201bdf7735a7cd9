#pragma once

// LSTM with a forget gate:
//   i = sig(W_i x + U_i h + b_i)    f = sig(W_f x + U_f h + b_f)
//   o = sig(W_o x + U_o h + b_o)    g = tanh(W_g x + U_g h + b_g)
//   c' = f*c + i*g                  h' = o*tanh(c')
// The four gates are stacked in one (4H x I) input matrix, one (4H x H)
// recurrent matrix and one 4H bias, in the order i, f, o, g.

#include <cmath>
#include <stdexcept>
#include <string>

#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/nn/layers.hpp"
#include "wsd/rng.hpp"

namespace wsd::nn {

enum class Direction { Forward, Backward };

enum Gate : int { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };

struct LstmParams {
  Matrix W;  // 4H x I
  Matrix U;  // 4H x H
  Vector b;  // 4H

  LstmParams() = default;
  LstmParams(Eigen::Index input_dim, Eigen::Index hidden_dim)
      : W(Matrix::Zero(4 * hidden_dim, input_dim)),
        U(Matrix::Zero(4 * hidden_dim, hidden_dim)),
        b(Vector::Zero(4 * hidden_dim)) {}

  Eigen::Index hidden_dim() const { return U.cols(); }
  Eigen::Index input_dim() const { return W.cols(); }

  auto W_gate(Gate g) { return W.middleRows(g * hidden_dim(), hidden_dim()); }
  auto U_gate(Gate g) { return U.middleRows(g * hidden_dim(), hidden_dim()); }
  auto b_gate(Gate g) { return b.segment(g * hidden_dim(), hidden_dim()); }
  auto W_gate(Gate g) const { return W.middleRows(g * hidden_dim(), hidden_dim()); }
  auto U_gate(Gate g) const { return U.middleRows(g * hidden_dim(), hidden_dim()); }
  auto b_gate(Gate g) const { return b.segment(g * hidden_dim(), hidden_dim()); }

  void check() const {
    const auto H = hidden_dim();
    if (W.rows() != 4 * H || U.rows() != 4 * H || b.size() != 4 * H)
      throw std::invalid_argument("LSTM parameter shapes are inconsistent");
  }

  // Glorot-uniform weights, zero bias with the forget-gate bias at 1.
  static LstmParams glorot(Eigen::Index input_dim, Eigen::Index hidden_dim, Rng& rng) {
    LstmParams p(input_dim, hidden_dim);
    const double lw = std::sqrt(6.0 / static_cast<double>(input_dim + 4 * hidden_dim));
    const double lu = std::sqrt(6.0 / static_cast<double>(hidden_dim + 4 * hidden_dim));
    for (Eigen::Index c = 0; c < p.W.cols(); ++c)
      for (Eigen::Index r = 0; r < p.W.rows(); ++r) p.W(r, c) = rng.uniform(-lw, lw);
    for (Eigen::Index c = 0; c < p.U.cols(); ++c)
      for (Eigen::Index r = 0; r < p.U.rows(); ++r) p.U(r, c) = rng.uniform(-lu, lu);
    p.b_gate(kForget).setOnes();
    return p;
  }
};

struct CellStep {
  Vector h, c;
  Vector i, f, o, g;  // post-activation gates
};

inline CellStep lstm_cell_forward(const Vector& x, const Vector& h_prev,
                                  const Vector& c_prev, const LstmParams& p) {
  p.check();
  const auto H = p.hidden_dim();
  if (x.size() != p.input_dim() || h_prev.size() != H || c_prev.size() != H)
    throw std::invalid_argument("lstm_cell_forward: dimension mismatch");
  const Vector z = p.W * x + p.U * h_prev + p.b;
  CellStep s;
  s.i = sigmoid(Vector(z.segment(kInput * H, H)));
  s.f = sigmoid(Vector(z.segment(kForget * H, H)));
  s.o = sigmoid(Vector(z.segment(kOutput * H, H)));
  s.g = z.segment(kCandidate * H, H).array().tanh();
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.h = s.o.cwiseProduct(Vector(s.c.array().tanh()));
  return s;
}

// Activations of one layer over the valid part of a sequence, stored in
// processing order (reversed time for the backward direction).
struct LstmTrace {
  Direction direction = Direction::Forward;
  Matrix x;       // I x T inputs
  Matrix gates;   // 4H x T post-activation i, f, o, g
  Matrix c;       // H x T
  Matrix tanh_c;  // H x T
  Matrix h;       // H x T

  Eigen::Index steps() const { return h.cols(); }

  // Hidden states re-indexed by time position.
  Matrix hidden_time_order() const {
    if (direction == Direction::Forward) return h;
    return h.rowwise().reverse();
  }
};

// `inputs` holds one column per valid timestep in time order.
inline LstmTrace lstm_layer_forward(const Matrix& inputs, const LstmParams& p,
                                    Direction direction) {
  p.check();
  if (inputs.cols() == 0) throw InputError("empty sequence");
  if (inputs.rows() != p.input_dim())
    throw std::invalid_argument("lstm_layer_forward: input dim " +
                                std::to_string(inputs.rows()) + " != " +
                                std::to_string(p.input_dim()));
  const auto H = p.hidden_dim();
  const auto T = inputs.cols();
  LstmTrace tr;
  tr.direction = direction;
  tr.x = direction == Direction::Forward ? inputs : Matrix(inputs.rowwise().reverse());
  Matrix z = p.W * tr.x;
  z.colwise() += p.b;
  tr.gates.resize(4 * H, T);
  tr.c.resize(H, T);
  tr.tanh_c.resize(H, T);
  tr.h.resize(H, T);
  Vector h_prev = Vector::Zero(H);
  Vector c_prev = Vector::Zero(H);
  for (Eigen::Index t = 0; t < T; ++t) {
    Vector zt = z.col(t);
    zt.noalias() += p.U * h_prev;
    auto gate = tr.gates.col(t);
    for (Eigen::Index k = 0; k < 3 * H; ++k) gate(k) = sigmoid(zt(k));
    for (Eigen::Index k = 3 * H; k < 4 * H; ++k) gate(k) = std::tanh(zt(k));
    tr.c.col(t) = gate.segment(kForget * H, H).cwiseProduct(c_prev) +
                  gate.segment(kInput * H, H).cwiseProduct(gate.segment(kCandidate * H, H));
    tr.tanh_c.col(t) = tr.c.col(t).array().tanh();
    tr.h.col(t) = gate.segment(kOutput * H, H).cwiseProduct(tr.tanh_c.col(t));
    h_prev = tr.h.col(t);
    c_prev = tr.c.col(t);
  }
  return tr;
}

// Backpropagation through time. `d_hidden` is dLoss/dh in time order (H x T).
// Accumulates into `grads` and returns dLoss/dinputs in time order.
inline Matrix lstm_layer_backward(const LstmTrace& tr, const LstmParams& p,
                                  const Matrix& d_hidden, LstmParams& grads) {
  const auto H = p.hidden_dim();
  const auto T = tr.steps();
  if (d_hidden.rows() != H || d_hidden.cols() != T)
    throw std::invalid_argument("lstm_layer_backward: gradient shape mismatch");
  const Matrix dh_proc =
      tr.direction == Direction::Forward ? d_hidden : Matrix(d_hidden.rowwise().reverse());
  Matrix dz(4 * H, T);
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gate = tr.gates.col(t);
    const auto i = gate.segment(kInput * H, H).array();
    const auto f = gate.segment(kForget * H, H).array();
    const auto o = gate.segment(kOutput * H, H).array();
    const auto g = gate.segment(kCandidate * H, H).array();
    const auto tc = tr.tanh_c.col(t).array();
    const Eigen::ArrayXd dh = dh_proc.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dh * o * (1.0 - tc * tc) + dc_next.array();
    Eigen::ArrayXd c_prev = t > 0 ? Eigen::ArrayXd(tr.c.col(t - 1).array())
                                  : Eigen::ArrayXd::Zero(H);
    dz.col(t).segment(kInput * H, H) = (dc * g * i * (1.0 - i)).matrix();
    dz.col(t).segment(kForget * H, H) = (dc * c_prev * f * (1.0 - f)).matrix();
    dz.col(t).segment(kOutput * H, H) = (dh * tc * o * (1.0 - o)).matrix();
    dz.col(t).segment(kCandidate * H, H) = (dc * i * (1.0 - g * g)).matrix();
    dc_next = (dc * f).matrix();
    dh_next.noalias() = p.U.transpose() * dz.col(t);
  }
  Matrix h_prev = Matrix::Zero(H, T);
  if (T > 1) h_prev.rightCols(T - 1) = tr.h.leftCols(T - 1);
  grads.W.noalias() += dz * tr.x.transpose();
  grads.U.noalias() += dz * h_prev.transpose();
  grads.b += dz.rowwise().sum();
  Matrix dx = p.W.transpose() * dz;
  if (tr.direction == Direction::Backward) return dx.rowwise().reverse();
  return dx;
}

}  // namespace wsd::nn
