#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soundguard {

enum class FeatureKind : std::uint8_t { kLogMel = 0, kMfcc = 1 };

/// "log-mel" or "mfcc", matching the feature-set names in reports.
std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

/// Short-time analysis parameters. Defaults: 25 ms Hann frames every 10 ms
/// at 16 kHz, 512-point FFT, 26 HTK mel bands over 0-8 kHz, 12 MFCCs (c0
/// dropped), natural log floored at 1e-10.
struct FeatureConfig {
  int sample_rate = 16000;
  std::size_t frame_len = 400;
  std::size_t frame_hop = 160;
  std::size_t fft_size = 512;
  std::size_t n_mels = 26;
  std::size_t n_mfcc = 12;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-10;

  /// Throws Error(kConfig) when the invariants do not hold.
  void Validate() const;
  std::size_t dims(FeatureKind kind) const { return kind == FeatureKind::kLogMel ? n_mels : n_mfcc; }
  std::size_t n_bins() const { return fft_size / 2 + 1; }

  bool operator==(const FeatureConfig&) const = default;
};

/// Read-only row-major frames x dims window onto feature storage.
struct FeatureView {
  std::span<const double> values;
  std::size_t frames = 0;
  std::size_t dims = 0;

  std::span<const double> row(std::size_t t) const { return values.subspan(t * dims, dims); }
  double at(std::size_t t, std::size_t f) const { return values[t * dims + f]; }

  /// Rows [first, first + count).
  FeatureView Rows(std::size_t first, std::size_t count) const {
    return {values.subspan(first * dims, count * dims), count, dims};
  }
};

/// T frames x F coefficients of one segment (or clip).
struct FeatureMatrix {
  std::vector<double> values;
  std::size_t frames = 0;
  std::size_t dims = 0;
  FeatureKind kind = FeatureKind::kLogMel;
  bool normalized = false;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t t, std::size_t f, FeatureKind k)
      : values(t * f, 0.0), frames(t), dims(f), kind(k) {}

  double& at(std::size_t t, std::size_t f) { return values[t * dims + f]; }
  double at(std::size_t t, std::size_t f) const { return values[t * dims + f]; }
  std::span<double> row(std::size_t t) { return std::span(values).subspan(t * dims, dims); }
  std::span<const double> row(std::size_t t) const { return std::span(values).subspan(t * dims, dims); }

  FeatureView view() const { return {values, frames, dims}; }
};

}  // namespace soundguard
