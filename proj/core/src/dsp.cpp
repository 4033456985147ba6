#include "soundguard/dsp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "soundguard/error.hpp"

namespace soundguard {

using std::numbers::pi;

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kLogMel ? "log-mel" : "mfcc";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "log-mel" || name == "log_mel" || name == "logmel") return FeatureKind::kLogMel;
  if (name == "mfcc") return FeatureKind::kMfcc;
  Fail(ErrorKind::kConfig, "unknown feature kind '" + std::string(name) + "'");
}

void FeatureConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorKind::kConfig, std::string("invalid feature config: ") + what);
  };
  require(sample_rate > 0, "sample_rate must be positive");
  require(frame_len > 0 && frame_hop > 0, "frame_len and frame_hop must be positive");
  require(std::has_single_bit(fft_size), "fft_size must be a power of two");
  require(fft_size >= frame_len, "fft_size must be >= frame_len");
  require(n_mels >= 2, "n_mels must be >= 2");
  require(n_mfcc < n_mels, "n_mfcc must be < n_mels");
  require(fmin >= 0.0 && fmin < fmax, "need 0 <= fmin < fmax");
  require(fmax <= sample_rate / 2.0, "fmax must not exceed Nyquist");
  require(log_floor > 0.0, "log_floor must be positive");
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * i / n);
  return w;
}

std::size_t FrameCount(std::size_t n_samples, std::size_t frame_len, std::size_t frame_hop) {
  if (n_samples < frame_len) return 0;
  return (n_samples - frame_len) / frame_hop + 1;
}

namespace {

Matrix FrameWithWindow(std::span<const float> samples, const FeatureConfig& config,
                       std::span<const double> window) {
  const std::size_t count = FrameCount(samples.size(), config.frame_len, config.frame_hop);
  if (count == 0) {
    Fail(ErrorKind::kInvalidInput, "need at least " + std::to_string(config.frame_len) +
                                       " samples for one frame, got " +
                                       std::to_string(samples.size()));
  }
  Matrix frames(count, config.frame_len);
  for (std::size_t t = 0; t < count; ++t) {
    const float* src = samples.data() + t * config.frame_hop;
    auto dst = frames.row(t);
    for (std::size_t i = 0; i < config.frame_len; ++i) dst[i] = src[i] * window[i];
  }
  return frames;
}

}  // namespace

Matrix FrameAndWindow(std::span<const float> samples, const FeatureConfig& config) {
  const auto window = HannWindow(config.frame_len);
  return FrameWithWindow(samples, config, window);
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!std::has_single_bit(n)) Fail(ErrorKind::kInvalidInput, "FFT size must be a power of two");
  bitrev_.resize(n);
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    bitrev_[i] = j;
  }
  cos_.resize(n / 2);
  sin_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    cos_[k] = std::cos(angle);
    sin_[k] = -std::sin(angle);
  }
}

void FftPlan::Transform(std::span<std::complex<double>> data) const {
  if (data.size() != n_) Fail(ErrorKind::kInvalidInput, "FFT input has the wrong size");
  for (std::size_t i = 1; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  // Interleaved (re, im) pairs; std::complex operator* goes through the
  // slow NaN-aware path.
  double* x = reinterpret_cast<double*>(data.data());
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = cos_[k * stride];
        const double wi = sin_[k * stride];
        double* a = x + 2 * (start + k);
        double* b = x + 2 * (start + k + half);
        const double vr = b[0] * wr - b[1] * wi;
        const double vi = b[0] * wi + b[1] * wr;
        b[0] = a[0] - vr;
        b[1] = a[1] - vi;
        a[0] += vr;
        a[1] += vi;
      }
    }
  }
}

void Fft(std::span<std::complex<double>> data) { FftPlan(data.size()).Transform(data); }

Matrix PowerSpectrum(const Matrix& frames, const FftPlan& plan) {
  const std::size_t fft_size = plan.size();
  if (frames.cols > fft_size) Fail(ErrorKind::kInvalidInput, "frame longer than FFT size");
  const std::size_t bins = fft_size / 2 + 1;
  Matrix power(frames.rows, bins);
  std::vector<std::complex<double>> buffer(fft_size);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    const auto src = frames.row(t);
    std::fill(buffer.begin(), buffer.end(), std::complex<double>{});
    for (std::size_t i = 0; i < src.size(); ++i) buffer[i] = src[i];
    plan.Transform(buffer);
    auto dst = power.row(t);
    for (std::size_t k = 0; k < bins; ++k) {
      dst[k] = buffer[k].real() * buffer[k].real() + buffer[k].imag() * buffer[k].imag();
    }
  }
  return power;
}

Matrix PowerSpectrum(const Matrix& frames, std::size_t fft_size) {
  return PowerSpectrum(frames, FftPlan(fft_size));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix MelFilterbank(const FeatureConfig& config) {
  config.Validate();
  const std::size_t bins = config.n_bins();
  const double mel_lo = HzToMel(config.fmin);
  const double mel_hi = HzToMel(config.fmax);
  std::vector<double> edges(config.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (config.n_mels + 1));
  }
  const double bin_hz = static_cast<double>(config.sample_rate) / config.fft_size;
  Matrix bank(config.n_mels, bins);
  for (std::size_t m = 0; m < config.n_mels; ++m) {
    const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= centre) {
        w = (f - lo) / (centre - lo);
      } else if (f > centre && f < hi) {
        w = (hi - f) / (hi - centre);
      }
      bank(m, k) = w;
    }
  }
  return bank;
}

Matrix DctMatrix(std::size_t n_in, std::size_t n_out) {
  Matrix dct(n_out, n_in);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_in);
    for (std::size_t n = 0; n < n_in; ++n) {
      dct(k, n) = scale * std::cos(pi * k * (n + 0.5) / n_in);
    }
  }
  return dct;
}

FeatureExtractor::FeatureExtractor(FeatureConfig config)
    : config_(config),
      plan_((config.Validate(), config.fft_size)),
      window_(HannWindow(config.frame_len)),
      filterbank_(MelFilterbank(config)),
      dct_(DctMatrix(config.n_mels, config.n_mfcc + 1)) {
  for (std::size_t m = 0; m < filterbank_.rows; ++m) {
    const auto row = filterbank_.row(m);
    std::size_t first = 0;
    while (first < row.size() && row[first] == 0.0) ++first;
    std::size_t last = row.size();
    while (last > first && row[last - 1] == 0.0) --last;
    support_.emplace_back(first, last);
  }
}

FeatureMatrix FeatureExtractor::LogMelFromPower(const Matrix& power) const {
  FeatureMatrix out(power.rows, config_.n_mels, FeatureKind::kLogMel);
  for (std::size_t t = 0; t < power.rows; ++t) {
    const auto spec = power.row(t);
    auto dst = out.row(t);
    for (std::size_t m = 0; m < config_.n_mels; ++m) {
      const auto weights = filterbank_.row(m);
      const auto [first, last] = support_[m];
      double energy = 0.0;
      for (std::size_t k = first; k < last; ++k) energy += weights[k] * spec[k];
      dst[m] = std::log(std::max(energy, config_.log_floor));
    }
  }
  return out;
}

FeatureMatrix FeatureExtractor::MfccFromLogMel(const FeatureMatrix& log_mel) const {
  FeatureMatrix out(log_mel.frames, config_.n_mfcc, FeatureKind::kMfcc);
  for (std::size_t t = 0; t < log_mel.frames; ++t) {
    const auto src = log_mel.row(t);
    auto dst = out.row(t);
    for (std::size_t k = 1; k <= config_.n_mfcc; ++k) {
      const auto basis = dct_.row(k);
      double acc = 0.0;
      for (std::size_t n = 0; n < src.size(); ++n) acc += basis[n] * src[n];
      dst[k - 1] = acc;
    }
  }
  return out;
}

FeatureMatrix FeatureExtractor::LogMel(std::span<const float> samples) const {
  return LogMelFromPower(PowerSpectrum(FrameWithWindow(samples, config_, window_), plan_));
}

FeatureMatrix FeatureExtractor::Mfcc(std::span<const float> samples) const {
  return MfccFromLogMel(LogMel(samples));
}

FeatureMatrix FeatureExtractor::Compute(std::span<const float> samples, FeatureKind kind) const {
  return kind == FeatureKind::kLogMel ? LogMel(samples) : Mfcc(samples);
}

FeatureMatrix LogMel(std::span<const float> samples, const FeatureConfig& config) {
  return FeatureExtractor(config).LogMel(samples);
}

FeatureMatrix Mfcc(std::span<const float> samples, const FeatureConfig& config) {
  return FeatureExtractor(config).Mfcc(samples);
}

ClipFeatures FeaturizeClip(const AudioClip& clip, const SegmentParams& params,
                           const FeatureExtractor& extractor, FeatureKind kind) {
  const FeatureConfig& config = extractor.config();
  if (clip.sample_rate != config.sample_rate) {
    Fail(ErrorKind::kConfig, "clip " + clip.id + " is at " + std::to_string(clip.sample_rate) +
                                 " Hz; features expect " + std::to_string(config.sample_rate));
  }
  const auto segments = SegmentClip(clip, params);
  ClipFeatures out;
  out.clip_id = clip.id;
  out.label = clip.label;
  out.kind = kind;

  const std::size_t hop = SecondsToSamples(params.hop_seconds, clip.sample_rate);
  const bool aligned = hop % config.frame_hop == 0;
  if (aligned) {
    out.storage.push_back(extractor.Compute(clip.samples, kind));
  }
  for (const Segment& seg : segments) {
    const std::size_t frames = FrameCount(seg.samples.size(), config.frame_len, config.frame_hop);
    if (frames == 0) {
      Fail(ErrorKind::kInvalidInput, "segment of clip " + clip.id + " is shorter than one frame");
    }
    ClipFeatures::Slice slice;
    slice.frames = frames;
    slice.start_sample = seg.start_sample;
    if (aligned) {
      slice.first_frame = seg.start_sample / config.frame_hop;
    } else {
      slice.storage = out.storage.size();
      out.storage.push_back(extractor.Compute(seg.samples, kind));
    }
    out.segments.push_back(slice);
  }
  return out;
}

}  // namespace soundguard
