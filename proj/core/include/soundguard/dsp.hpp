#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "soundguard/audio_io.hpp"
#include "soundguard/features.hpp"
#include "soundguard/segmenter.hpp"

namespace soundguard {

/// Dense row-major matrix used by the front end.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return std::span(data).subspan(r * cols, cols); }
  std::span<const double> row(std::size_t r) const { return std::span(data).subspan(r * cols, cols); }
};

/// Periodic Hann window: w[i] = 0.5 - 0.5 cos(2 pi i / n).
std::vector<double> HannWindow(std::size_t n);

/// Number of full frames in `n_samples`; 0 when not even one fits.
std::size_t FrameCount(std::size_t n_samples, std::size_t frame_len, std::size_t frame_hop);

/// Slices `samples` into frames of `frame_len` every `frame_hop` samples and
/// multiplies each by the Hann window. Throws Error(kInvalidInput) when fewer
/// than frame_len samples are given.
Matrix FrameAndWindow(std::span<const float> samples, const FeatureConfig& config);

/// Precomputed bit-reversal and twiddle tables for one radix-2 size.
class FftPlan {
 public:
  /// Throws Error(kInvalidInput) unless n is a power of two.
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }
  /// In-place forward transform of exactly size() values.
  void Transform(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<double> cos_;  // cos(2 pi k / n), k < n/2
  std::vector<double> sin_;  // -sin(2 pi k / n)
};

/// In-place iterative radix-2 FFT. Size must be a power of two.
void Fft(std::span<std::complex<double>> data);

/// One-sided |X[k]|^2 of each zero-padded row, k = 0..fft_size/2.
Matrix PowerSpectrum(const Matrix& frames, std::size_t fft_size);
Matrix PowerSpectrum(const Matrix& frames, const FftPlan& plan);

double HzToMel(double hz);
double MelToHz(double mel);

/// n_mels x (fft_size/2 + 1) triangular filters with centres evenly spaced
/// on the HTK mel scale between fmin and fmax; each triangle peaks at 1.
Matrix MelFilterbank(const FeatureConfig& config);

/// Orthonormal DCT-II basis, n_out x n_in: row k is
/// s_k cos(pi k (n + 0.5) / n_in), s_0 = sqrt(1/n_in), s_k = sqrt(2/n_in).
Matrix DctMatrix(std::size_t n_in, std::size_t n_out);

/// Precomputed front end (window, filterbank, DCT). Immutable once built,
/// so one instance may serve many threads.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig config);

  const FeatureConfig& config() const { return config_; }
  const Matrix& filterbank() const { return filterbank_; }

  /// ln(max(filterbank . power, floor)) per frame.
  FeatureMatrix LogMel(std::span<const float> samples) const;
  /// DCT-II of each log-mel frame, coefficients 1..n_mfcc.
  FeatureMatrix Mfcc(std::span<const float> samples) const;
  FeatureMatrix Compute(std::span<const float> samples, FeatureKind kind) const;

  /// Log-mel rows for already-computed power spectra.
  FeatureMatrix LogMelFromPower(const Matrix& power) const;
  FeatureMatrix MfccFromLogMel(const FeatureMatrix& log_mel) const;

 private:
  FeatureConfig config_;
  FftPlan plan_;
  std::vector<double> window_;
  Matrix filterbank_;
  std::vector<std::pair<std::size_t, std::size_t>> support_;  // nonzero bins of each filter
  Matrix dct_;
};

FeatureMatrix LogMel(std::span<const float> samples, const FeatureConfig& config = {});
FeatureMatrix Mfcc(std::span<const float> samples, const FeatureConfig& config = {});

/// Features of every segment of a clip. When the segment hop is a whole
/// number of frame hops the clip is analysed once and each segment is a row
/// range of that matrix, which is identical to analysing the segment alone.
struct ClipFeatures {
  struct Slice {
    std::size_t storage = 0;  // index into `storage`
    std::size_t first_frame = 0;
    std::size_t frames = 0;
    std::size_t start_sample = 0;
  };

  std::string clip_id;
  ClassLabel label = ClassLabel::kNonPorn;
  FeatureKind kind = FeatureKind::kLogMel;
  std::vector<FeatureMatrix> storage;
  std::vector<Slice> segments;

  FeatureView segment(std::size_t i) const {
    const Slice& s = segments[i];
    return storage[s.storage].view().Rows(s.first_frame, s.frames);
  }
};

/// Segments `clip` and extracts `kind` features for each segment. Throws
/// Error(kInvalidInput) when a segment is shorter than one frame.
ClipFeatures FeaturizeClip(const AudioClip& clip, const SegmentParams& params,
                           const FeatureExtractor& extractor, FeatureKind kind);

}  // namespace soundguard
