#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "soundguard/features.hpp"

namespace soundguard {

/// Per-coefficient mean and population variance over training frames.
struct CmvnStats {
  FeatureKind kind = FeatureKind::kLogMel;
  std::vector<double> mean;
  std::vector<double> variance;
  std::uint64_t frame_count = 0;

  std::size_t dims() const { return mean.size(); }
  bool operator==(const CmvnStats&) const = default;
};

inline constexpr double kCmvnEpsilon = 1e-8;

/// Streaming pooled statistics. Sums are taken relative to the first frame
/// seen and accumulated with Neumaier compensation, so the result does not
/// depend on the order views are added beyond ~1e-12 relative.
class CmvnAccumulator {
 public:
  explicit CmvnAccumulator(FeatureKind kind) : kind_(kind) {}

  /// Adds every frame of `view`. Throws Error(kConfig) on a dimension change.
  void Add(const FeatureView& view);
  /// Throws Error(kInsufficientData) with fewer than two frames in total.
  CmvnStats Finish() const;

 private:
  struct Compensated {
    double sum = 0.0;
    double carry = 0.0;
    void Add(double x);
    double value() const { return sum + carry; }
  };

  FeatureKind kind_;
  std::vector<double> shift_;
  std::vector<Compensated> sum_;
  std::vector<Compensated> sum_sq_;
  std::uint64_t frames_ = 0;
};

CmvnStats CmvnFit(FeatureKind kind, std::span<const FeatureView> training);

/// value' = (value - mean) / sqrt(variance + 1e-8), in place. Throws
/// Error(kConfig) when the matrix kind or width does not match the stats.
void CmvnApply(FeatureMatrix& features, const CmvnStats& stats);

/// Undoes CmvnApply.
void CmvnInvert(FeatureMatrix& features, const CmvnStats& stats);

}  // namespace soundguard
