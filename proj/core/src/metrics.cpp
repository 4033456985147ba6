#include "soundguard/metrics.hpp"

#include "soundguard/error.hpp"

namespace soundguard {
namespace {

double Ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

Metrics MetricsFromCounts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  // Class 1: positives are predicted-1; class 0 mirrors with tn as its hits.
  m.precision[1] = Ratio(tp, tp + fp);
  m.recall[1] = Ratio(tp, tp + fn);
  m.precision[0] = Ratio(tn, tn + fn);
  m.recall[0] = Ratio(tn, tn + fp);
  for (int c = 0; c < 2; ++c) {
    m.f1[c] = Ratio(2.0 * m.precision[c] * m.recall[c], m.precision[c] + m.recall[c]);
  }
  m.macro_f1 = 0.5 * (m.f1[0] + m.f1[1]);
  return m;
}

Metrics MacroF1(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    Fail(ErrorKind::kInvalidInput, "predictions and labels differ in length");
  }
  if (predictions.empty()) Fail(ErrorKind::kInvalidInput, "no predictions to score");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) {
      Fail(ErrorKind::kInvalidInput, "predictions and labels must be 0 or 1");
    }
    if (p == 1 && y == 1) ++tp;
    else if (p == 1) ++fp;
    else if (y == 1) ++fn;
    else ++tn;
  }
  return MetricsFromCounts(tp, fp, tn, fn);
}

}  // namespace soundguard
