#include "soundguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "soundguard/error.hpp"
#include "soundguard/rng.hpp"

namespace soundguard {
namespace {

using std::numbers::pi;

constexpr double kNoiseFloor = 1e-3;
constexpr double kPeakLimit = 0.95;

// RBJ band-pass biquad (constant 0 dB peak gain).
class BandPass {
 public:
  BandPass(double centre_hz, double q, int sample_rate) {
    const double w0 = 2.0 * pi * centre_hz / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    b0_ = alpha / a0;
    b2_ = -alpha / a0;
    a1_ = -2.0 * std::cos(w0) / a0;
    a2_ = (1.0 - alpha) / a0;
  }

  double operator()(double x) {
    const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double b0_, b2_, a1_, a2_;
  double x1_ = 0.0, x2_ = 0.0, y1_ = 0.0, y2_ = 0.0;
};

// Raised-cosine fade in/out over `fade` samples.
double Envelope(std::size_t i, std::size_t n, std::size_t fade) {
  if (fade == 0) return 1.0;
  const std::size_t edge = std::min(i, n - 1 - i);
  if (edge >= fade) return 1.0;
  return 0.5 - 0.5 * std::cos(pi * static_cast<double>(edge) / fade);
}

void BreathBurst(std::span<double> out, Rng& rng, int sr) {
  BandPass filter(rng.Uniform(350.0, 1200.0), rng.Uniform(0.8, 2.0), sr);
  const double mod_hz = rng.Uniform(0.3, 3.0);
  const double phase = rng.Uniform(0.0, 2.0 * pi);
  const double level = rng.Uniform(0.5, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    const double am = 0.5 - 0.5 * std::cos(2.0 * pi * mod_hz * t + phase);
    out[i] += level * 3.0 * am * filter(rng.Normal()) * Envelope(i, out.size(), sr / 20);
  }
}

void VoicedTone(std::span<double> out, Rng& rng, int sr) {
  const double f0 = rng.Uniform(120.0, 260.0);
  const double glide = rng.Uniform(-0.25, 0.25);  // fractional change over the tone
  const double vib_rate = rng.Uniform(4.0, 7.0);
  const double vib_depth = rng.Uniform(0.02, 0.05);
  const double level = rng.Uniform(0.4, 0.8);
  const double n = static_cast<double>(out.size());
  double weight[9];
  for (int k = 1; k <= 8; ++k) weight[k] = 1.0 / std::pow(k, 1.5);
  double phase = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    const double f = f0 * (1.0 + glide * i / n) * (1.0 + vib_depth * std::sin(2.0 * pi * vib_rate * t));
    phase += 2.0 * pi * f / sr;
    // sin(k x) = 2 cos(x) sin((k-1) x) - sin((k-2) x)
    const double s1 = std::sin(phase);
    const double c2 = 2.0 * std::cos(phase);
    double prev = 0.0, cur = s1, v = 0.0;
    for (int k = 1; k <= 8; ++k) {
      v += cur * weight[k];
      const double next = c2 * cur - prev;
      prev = cur;
      cur = next;
    }
    out[i] += level * v * Envelope(i, out.size(), sr / 8);
  }
}

void Chord(std::span<double> out, Rng& rng, int sr) {
  static constexpr double kMajor[] = {1.0, 1.259921, 1.498307, 2.0};
  static constexpr double kMinor[] = {1.0, 1.189207, 1.498307, 2.0};
  const double* ratios = rng.Uniform() < 0.5 ? kMajor : kMinor;
  const double root = rng.Uniform(180.0, 520.0);
  const double level = rng.Uniform(0.15, 0.25);
  double phases[4];
  for (double& p : phases) p = rng.Uniform(0.0, 2.0 * pi);

  // One rotating phasor per partial; renormalized now and then so rounding
  // cannot drift the amplitude.
  std::vector<std::complex<double>> partial, step;
  std::vector<double> amp;
  for (int note = 0; note < 4; ++note) {
    const double f = root * ratios[note];
    double a = 1.0;
    for (int k = 1; k <= 10 && k * f < sr / 2.0; ++k, a *= 0.6) {
      partial.push_back(std::polar(1.0, k * phases[note]));
      step.push_back(std::polar(1.0, 2.0 * pi * k * f / sr));
      amp.push_back(a);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < partial.size(); ++j) {
      v += amp[j] * partial[j].imag();
      partial[j] *= step[j];
    }
    if (i % 4096 == 4095) {
      for (auto& z : partial) z /= std::abs(z);
    }
    out[i] += level * v * Envelope(i, out.size(), sr / 50);
  }
}

std::size_t Samples(double seconds, int sr) {
  return static_cast<std::size_t>(std::llround(seconds * sr));
}

std::vector<double> RenderPositive(std::size_t n, Rng& rng, int sr) {
  std::vector<double> buf(n, 0.0);
  std::size_t pos = 0;
  while (pos < n) {
    const double pick = rng.Uniform();
    std::size_t len;
    if (pick < 0.4) {
      len = std::min(n - pos, Samples(rng.Uniform(2.0, 6.0), sr));
      BreathBurst(std::span(buf).subspan(pos, len), rng, sr);
    } else if (pick < 0.75) {
      len = std::min(n - pos, Samples(rng.Uniform(1.0, 4.0), sr));
      VoicedTone(std::span(buf).subspan(pos, len), rng, sr);
    } else {
      len = std::min(n - pos, Samples(rng.Uniform(0.5, 3.0), sr));
    }
    pos += len;
  }
  return buf;
}

std::vector<double> RenderNegative(std::size_t n, Rng& rng, int sr) {
  std::vector<double> buf(n, 0.0);
  const double noise_level = rng.Uniform(0.05, 0.12);
  for (double& v : buf) v = noise_level * rng.Normal();
  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t len = std::min(n - pos, Samples(rng.Uniform(1.5, 4.0), sr));
    Chord(std::span(buf).subspan(pos, len), rng, sr);
    pos += len;
  }
  return buf;
}

}  // namespace

void SynthConfig::Validate() const {
  if (clips_per_class == 0) Fail(ErrorKind::kConfig, "clips_per_class must be positive");
  if (sample_rate <= 0) Fail(ErrorKind::kConfig, "sample_rate must be positive");
  if (!(min_duration > 0.0) || max_duration < min_duration) {
    Fail(ErrorKind::kConfig, "need 0 < min_duration <= max_duration");
  }
  if (min_duration < segment_length) {
    Fail(ErrorKind::kConfig, "min_duration " + std::to_string(min_duration) +
                                 " s is below the segment length " +
                                 std::to_string(segment_length) + " s");
  }
}

AudioClip GenerateClip(const SynthConfig& config, ClassLabel label, std::size_t index) {
  config.Validate();
  const int sr = config.sample_rate;
  Rng rng(DeriveSeed(config.seed, (static_cast<std::uint64_t>(label) << 32) + index));
  const double duration = rng.Uniform(config.min_duration, config.max_duration);
  const std::size_t n = std::max<std::size_t>(1, Samples(duration, sr));

  std::vector<double> buf = label == ClassLabel::kPorn ? RenderPositive(n, rng, sr)
                                                       : RenderNegative(n, rng, sr);
  const double gain = rng.Uniform(0.2, 0.6);
  double peak = 0.0;
  for (double& v : buf) {
    v = gain * v + kNoiseFloor * rng.Normal();
    peak = std::max(peak, std::abs(v));
  }
  const double scale = peak > kPeakLimit ? kPeakLimit / peak : 1.0;

  AudioClip clip;
  char id[64];
  std::snprintf(id, sizeof(id), "class%d_%04zu", static_cast<int>(label), index);
  clip.id = id;
  clip.label = label;
  clip.sample_rate = sr;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) clip.samples[i] = static_cast<float>(buf[i] * scale);
  return clip;
}

DatasetManifest GenerateCorpus(const SynthConfig& config, const std::filesystem::path& out_dir) {
  config.Validate();
  DatasetManifest manifest;
  for (ClassLabel label : {ClassLabel::kNonPorn, ClassLabel::kPorn}) {
    for (std::size_t i = 0; i < config.clips_per_class; ++i) {
      const AudioClip clip = GenerateClip(config, label, i);
      const std::string rel = "wav/" + clip.id + ".wav";
      WriteWav(out_dir / rel, clip, WavEncoding::kPcm16);
      manifest.entries.push_back({rel, label, Split::kUnassigned});
    }
  }
  SaveManifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace soundguard
