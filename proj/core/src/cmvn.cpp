#include "soundguard/cmvn.hpp"

#include <cmath>

#include "soundguard/error.hpp"

namespace soundguard {

void CmvnAccumulator::Compensated::Add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    carry += (sum - t) + x;
  } else {
    carry += (x - t) + sum;
  }
  sum = t;
}

void CmvnAccumulator::Add(const FeatureView& view) {
  if (view.frames == 0) return;
  if (shift_.empty()) {
    shift_.assign(view.row(0).begin(), view.row(0).end());
    sum_.resize(view.dims);
    sum_sq_.resize(view.dims);
  } else if (view.dims != shift_.size()) {
    Fail(ErrorKind::kConfig, "CMVN input width changed from " + std::to_string(shift_.size()) +
                                 " to " + std::to_string(view.dims));
  }
  for (std::size_t t = 0; t < view.frames; ++t) {
    const auto row = view.row(t);
    for (std::size_t f = 0; f < view.dims; ++f) {
      const double d = row[f] - shift_[f];
      sum_[f].Add(d);
      sum_sq_[f].Add(d * d);
    }
  }
  frames_ += view.frames;
}

CmvnStats CmvnAccumulator::Finish() const {
  if (frames_ < 2) Fail(ErrorKind::kInsufficientData, "CMVN needs at least two training frames");
  CmvnStats stats;
  stats.kind = kind_;
  stats.frame_count = frames_;
  const auto n = static_cast<double>(frames_);
  stats.mean.resize(shift_.size());
  stats.variance.resize(shift_.size());
  for (std::size_t f = 0; f < shift_.size(); ++f) {
    const double mean_shifted = sum_[f].value() / n;
    stats.mean[f] = shift_[f] + mean_shifted;
    stats.variance[f] = std::max(0.0, sum_sq_[f].value() / n - mean_shifted * mean_shifted);
  }
  return stats;
}

CmvnStats CmvnFit(FeatureKind kind, std::span<const FeatureView> training) {
  CmvnAccumulator acc(kind);
  for (const auto& view : training) acc.Add(view);
  return acc.Finish();
}

namespace {

void CheckCompatible(const FeatureMatrix& features, const CmvnStats& stats) {
  if (features.kind != stats.kind) {
    Fail(ErrorKind::kConfig, std::string("CMVN stats are for ") +
                                 std::string(FeatureKindName(stats.kind)) + " features, got " +
                                 std::string(FeatureKindName(features.kind)));
  }
  if (features.dims != stats.dims()) {
    Fail(ErrorKind::kConfig, "CMVN stats width " + std::to_string(stats.dims()) +
                                 " does not match features width " +
                                 std::to_string(features.dims));
  }
}

}  // namespace

void CmvnApply(FeatureMatrix& features, const CmvnStats& stats) {
  CheckCompatible(features, stats);
  if (features.normalized) Fail(ErrorKind::kConfig, "features are already normalized");
  std::vector<double> inv_std(stats.dims());
  for (std::size_t f = 0; f < stats.dims(); ++f) {
    inv_std[f] = 1.0 / std::sqrt(stats.variance[f] + kCmvnEpsilon);
  }
  for (std::size_t t = 0; t < features.frames; ++t) {
    auto row = features.row(t);
    for (std::size_t f = 0; f < row.size(); ++f) row[f] = (row[f] - stats.mean[f]) * inv_std[f];
  }
  features.normalized = true;
}

void CmvnInvert(FeatureMatrix& features, const CmvnStats& stats) {
  CheckCompatible(features, stats);
  if (!features.normalized) Fail(ErrorKind::kConfig, "features are not normalized");
  for (std::size_t t = 0; t < features.frames; ++t) {
    auto row = features.row(t);
    for (std::size_t f = 0; f < row.size(); ++f) {
      row[f] = row[f] * std::sqrt(stats.variance[f] + kCmvnEpsilon) + stats.mean[f];
    }
  }
  features.normalized = false;
}

}  // namespace soundguard
