#pragma once

#include <cstddef>
#include <span>

namespace soundguard {

/// Two-class confusion counts with per-class and macro F1. Class 1 is the
/// positive class for tp/fp/fn/tn.
struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double precision[2] = {0.0, 0.0};
  double recall[2] = {0.0, 0.0};
  double f1[2] = {0.0, 0.0};
  double macro_f1 = 0.0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Precision, recall and F1 for each class, then their unweighted mean.
/// A ratio with a zero denominator counts as 0, so a class that is never
/// predicted and never present scores F1 = 0. Throws Error(kInvalidInput)
/// on empty or mismatched inputs, or values other than 0/1.
Metrics MacroF1(std::span<const int> predictions, std::span<const int> labels);

Metrics MetricsFromCounts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

}  // namespace soundguard
