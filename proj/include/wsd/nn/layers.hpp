#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/rng.hpp"

namespace wsd::nn {

enum class Phase { Train, Eval };

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline Vector sigmoid(const Vector& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

inline double dense_logit(const Vector& x, const Vector& w, double b) {
  if (x.size() != w.size())
    throw std::invalid_argument("dense: input has " + std::to_string(x.size()) +
                                " components, weights " + std::to_string(w.size()));
  return w.dot(x) + b;
}

inline double dense_sigmoid_forward(const Vector& x, const Vector& w, double b) {
  return sigmoid(dense_logit(x, w, b));
}

// Inverted-dropout multipliers: 0 with probability `rate`, else 1/(1-rate).
inline Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                           Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InputError("dropout rate must lie in [0, 1)");
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      m(r, c) = rng.uniform() < rate ? 0.0 : keep;
  return m;
}

inline Vector dropout(const Vector& x, double rate, Phase phase, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw InputError("dropout rate must lie in [0, 1)");
  if (phase == Phase::Eval || rate == 0.0) return x;
  return x.cwiseProduct(dropout_mask(x.size(), 1, rate, rng).col(0));
}

inline constexpr double kBceEpsilon = 1e-7;

inline double bce_loss(double p, int y) {
  const double q = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

// d bce_loss(sigmoid(z), y) / dz. Zero where the clamp is active.
inline double bce_logit_grad(double p, int y) {
  if (p < kBceEpsilon || p > 1.0 - kBceEpsilon) return 0.0;
  return p - static_cast<double>(y);
}

}  // namespace wsd::nn
