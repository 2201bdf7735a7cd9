#pragma once

// Non-recurrent baselines on mean-embedding features: logistic regression and
// gradient-boosted regression trees under logistic loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wsd/embeddings.hpp"
#include "wsd/error.hpp"
#include "wsd/linalg.hpp"
#include "wsd/nn/layers.hpp"

namespace wsd::baselines {

using nn::sigmoid;

// Mean of the embedding rows of the statement's tokens (OOV row included).
// An empty statement maps to the zero vector.
inline Vector mean_embedding(const Tokens& tokens, const Vocabulary& vocab,
                             const EmbeddingMatrix& matrix) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(matrix.dim()));
  std::size_t n = 0;
  for (const auto& t : tokens) {
    const int id = vocab.lookup(t);
    if (id == kPadIndex) continue;
    out += matrix.rows.row(id).transpose();
    ++n;
  }
  if (n > 0) out /= static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegOptions {
  double l2 = 1e-4;
  double lr = 0.1;
  std::size_t epochs = 500;
  std::uint64_t seed = 1;  // reserved; full-batch descent from zero is deterministic
};

struct LogRegModel {
  Vector w;
  double b = 0.0;

  double predict(const Vector& x) const { return sigmoid(w.dot(x) + b); }
};

struct LogRegFit {
  LogRegModel model;
  std::vector<double> loss_history;  // objective before each epoch's update
};

inline double logreg_objective(const LogRegModel& m, const std::vector<Vector>& x,
                               const std::vector<int>& y, double l2) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += nn::bce_loss(m.predict(x[i]), y[i]);
  return total / static_cast<double>(x.size()) + 0.5 * l2 * m.w.squaredNorm();
}

// Full-batch gradient descent on mean BCE + (l2/2)|w|^2, starting from zero.
inline LogRegFit logreg_fit(const std::vector<Vector>& features, const std::vector<int>& labels,
                            const LogRegOptions& opt = {}) {
  if (features.empty()) throw InputError("logistic regression: empty training set");
  if (features.size() != labels.size())
    throw std::invalid_argument("logistic regression: feature/label count mismatch");
  const auto D = features.front().size();
  LogRegFit fit;
  fit.model.w = Vector::Zero(D);
  const double n = static_cast<double>(features.size());
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    Vector gw = opt.l2 * fit.model.w;
    double gb = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double p = fit.model.predict(features[i]);
      total += nn::bce_loss(p, labels[i]);
      const double r = nn::bce_logit_grad(p, labels[i]) / n;
      gw += r * features[i];
      gb += r;
    }
    fit.loss_history.push_back(total / n + 0.5 * opt.l2 * fit.model.w.squaredNorm());
    fit.model.w -= opt.lr * gw;
    fit.model.b -= opt.lr * gb;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Gradient-boosted trees

struct TreeNode {
  int feature = -1;         // -1 for leaves
  double threshold = 0.0;   // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;       // leaf output (Newton step)

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const Vector& x) const {
    int k = 0;
    while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
      const auto& nd = nodes[static_cast<std::size_t>(k)];
      k = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
  }

  int depth() const { return depth_from(0); }

 private:
  int depth_from(int k) const {
    const auto& nd = nodes[static_cast<std::size_t>(k)];
    if (nd.is_leaf()) return 0;
    return 1 + std::max(depth_from(nd.left), depth_from(nd.right));
  }
};

struct GbdtOptions {
  std::size_t n_trees = 200;
  int max_depth = 3;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;  // reserved; exhaustive greedy splits use no randomness
};

struct GbdtModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // log-odds prior
  int max_depth = 3;

  double raw_score(const Vector& x) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x);
    return base_score + learning_rate * s;
  }
};

inline double gbdt_predict(const GbdtModel& model, const Vector& x) {
  return sigmoid(model.raw_score(x));
}

inline constexpr double kNewtonGuard = 1e-9;

namespace detail {

struct TreeBuilder {
  const std::vector<Vector>& x;
  const std::vector<double>& residual;  // y - p
  const std::vector<double>& hessian;   // p (1 - p)
  int max_depth;
  RegressionTree tree;

  int build(std::vector<std::size_t> idx, int depth) {
    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum_r = 0.0, sum_h = 0.0;
    for (auto i : idx) {
      sum_r += residual[i];
      sum_h += hessian[i];
    }
    auto best = depth < max_depth ? best_split(idx) : std::nullopt;
    if (!best) {
      tree.nodes[static_cast<std::size_t>(self)].value = sum_r / std::max(sum_h, kNewtonGuard);
      return self;
    }
    std::vector<std::size_t> left, right;
    for (auto i : idx)
      (x[i](best->feature) <= best->threshold ? left : right).push_back(i);
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& nd = tree.nodes[static_cast<std::size_t>(self)];
    nd.feature = best->feature;
    nd.threshold = best->threshold;
    nd.left = l;
    nd.right = r;
    return self;
  }

  struct Split {
    int feature;
    double threshold;
    double gain;
  };

  // Greedy variance reduction on the residuals: maximize
  // S_L^2/n_L + S_R^2/n_R - S^2/n over features and midpoints between
  // distinct sorted values. Nodes with constant residuals are not split.
  std::optional<Split> best_split(const std::vector<std::size_t>& idx) const {
    if (idx.size() < 2) return std::nullopt;
    double total = 0.0;
    double lo = residual[idx[0]], hi = lo;
    for (auto i : idx) {
      total += residual[i];
      lo = std::min(lo, residual[i]);
      hi = std::max(hi, residual[i]);
    }
    if (hi - lo <= 1e-15) return std::nullopt;
    const double n = static_cast<double>(idx.size());
    const double base = total * total / n;
    std::optional<Split> best;
    std::vector<std::size_t> order = idx;
    const auto D = x[idx[0]].size();
    for (Eigen::Index f = 0; f < D; ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a](f) != x[b](f) ? x[a](f) < x[b](f) : a < b;
      });
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left_sum += residual[order[k]];
        const double xv = x[order[k]](f);
        const double xn = x[order[k + 1]](f);
        if (xv == xn) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = n - nl;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
        if (!best || gain > best->gain + 1e-12)
          best = Split{static_cast<int>(f), 0.5 * (xv + xn), gain};
      }
    }
    return best;
  }
};

}  // namespace detail

inline double clamped_logit(double mean) {
  const double q = std::clamp(mean, nn::kBceEpsilon, 1.0 - nn::kBceEpsilon);
  return std::log(q / (1.0 - q));
}

inline double gbdt_training_loss(const GbdtModel& model, const std::vector<Vector>& x,
                                 const std::vector<int>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += nn::bce_loss(gbdt_predict(model, x[i]), y[i]);
  return total / static_cast<double>(x.size());
}

// Stagewise boosting. Each tree is fit to the residuals y - p by greedy
// variance reduction; leaves take the Newton step sum(r) / sum(p (1 - p)).
inline GbdtModel gbdt_fit(const std::vector<Vector>& features, const std::vector<int>& labels,
                          const GbdtOptions& opt = {}) {
  if (opt.n_trees < 1) throw InputError("gbdt: n_trees must be at least 1");
  if (opt.max_depth < 1) throw InputError("gbdt: max_depth must be at least 1");
  if (opt.learning_rate <= 0.0) throw InputError("gbdt: learning_rate must be positive");
  if (features.empty()) throw InputError("gbdt: empty training set");
  if (features.size() != labels.size())
    throw std::invalid_argument("gbdt: feature/label count mismatch");
  GbdtModel model;
  model.learning_rate = opt.learning_rate;
  model.max_depth = opt.max_depth;
  const double mean = static_cast<double>(std::accumulate(labels.begin(), labels.end(), 0)) /
                      static_cast<double>(labels.size());
  model.base_score = clamped_logit(mean);

  const std::size_t n = features.size();
  std::vector<double> score(n, model.base_score), residual(n), hessian(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t t = 0; t < opt.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      residual[i] = static_cast<double>(labels[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    detail::TreeBuilder builder{features, residual, hessian, opt.max_depth, {}};
    builder.build(all, 0);
    for (std::size_t i = 0; i < n; ++i)
      score[i] += opt.learning_rate * builder.tree.predict(features[i]);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

}  // namespace wsd::baselines
