#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wsd/error.hpp"

namespace wsd {

// Positive class is 1 (sexist).
struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

inline ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& golds) {
  if (preds.size() != golds.size())
    throw InputError("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                     std::to_string(golds.size()) + " gold labels");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i], g = golds[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1))
      throw InputError("confusion: labels must be 0 or 1");
    if (p == 1 && g == 1) ++c.tp;
    else if (p == 1) ++c.fp;
    else if (g == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Any metric whose denominator is zero is reported as 0.
inline Scores precision_recall_f1(const ConfusionCounts& c) {
  Scores s;
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for fewer than 2 values
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace wsd
