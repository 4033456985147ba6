#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "soundguard/audio_io.hpp"
#include "soundguard/error.hpp"

namespace soundguard {
namespace {

constexpr double kKaiserBeta = 8.6;
constexpr double kCutoffFraction = 0.9;
// Sinc zero crossings on each side of the kernel centre.
constexpr int kZeroCrossings = 24;
// Phase tables above this count are computed on the fly instead.
constexpr std::int64_t kMaxTabulatedPhases = 4096;

double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

class SincKernel {
 public:
  // `cutoff` is in cycles per input sample.
  explicit SincKernel(double cutoff)
      : cutoff_(cutoff),
        half_width_(kZeroCrossings / (2.0 * cutoff)),
        norm_(1.0 / BesselI0(kKaiserBeta)) {}

  double half_width() const { return half_width_; }

  // Weight of an input sample `offset` input-samples away from the output
  // instant.
  double operator()(double offset) const {
    const double r = offset / half_width_;
    if (r <= -1.0 || r >= 1.0) return 0.0;
    const double window = BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) * norm_;
    const double x = 2.0 * cutoff_ * offset;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return 2.0 * cutoff_ * sinc * window;
  }

 private:
  double cutoff_;
  double half_width_;
  double norm_;
};

}  // namespace

std::vector<float> ResampleSamples(std::span<const float> samples,
                                   int source_rate, int target_rate) {
  if (source_rate <= 0 || target_rate <= 0) {
    Fail(ErrorKind::kInvalidInput, "sample rates must be positive");
  }
  if (source_rate == target_rate) return {samples.begin(), samples.end()};

  // Output sample n sits at input position n * down / up.
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = source_rate / g;
  const auto n_in = static_cast<std::int64_t>(samples.size());
  const std::int64_t n_out = (n_in * up + down / 2) / down;

  const double cutoff = kCutoffFraction * 0.5 * std::min(1.0, static_cast<double>(up) / down);
  const SincKernel kernel(cutoff);
  const auto reach = static_cast<std::int64_t>(std::ceil(kernel.half_width()));
  const std::int64_t taps = 2 * reach + 1;

  // Phase p means the output instant lies p/up past an input sample; tap j
  // then covers input index base - reach + j.
  auto fill_phase = [&](std::int64_t phase, double* dst) {
    const double frac = static_cast<double>(phase) / up;
    for (std::int64_t j = 0; j < taps; ++j) dst[j] = kernel(frac + reach - j);
  };

  const bool tabulate = up <= kMaxTabulatedPhases;
  std::vector<double> table(tabulate ? static_cast<std::size_t>(up * taps) : 0);
  if (tabulate) {
    for (std::int64_t p = 0; p < up; ++p) fill_phase(p, table.data() + p * taps);
  }
  std::vector<double> scratch(tabulate ? 0 : static_cast<std::size_t>(taps));

  std::vector<float> out(static_cast<std::size_t>(n_out));
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t base = (n * down) / up;
    const std::int64_t phase = (n * down) % up;
    const double* weights;
    if (tabulate) {
      weights = table.data() + phase * taps;
    } else {
      fill_phase(phase, scratch.data());
      weights = scratch.data();
    }
    const std::int64_t first = base - reach;
    const std::int64_t lo = std::max<std::int64_t>(0, first);
    const std::int64_t hi = std::min<std::int64_t>(n_in, first + taps);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += weights[i - first] * samples[i];
    out[static_cast<std::size_t>(n)] = static_cast<float>(acc);
  }
  return out;
}

AudioClip Resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) Fail(ErrorKind::kInvalidInput, "target rate must be positive");
  if (clip.sample_rate == target_rate) return clip;
  AudioClip out;
  out.id = clip.id;
  out.label = clip.label;
  out.sample_rate = target_rate;
  out.samples = ResampleSamples(clip.samples, clip.sample_rate, target_rate);
  return out;
}

}  // namespace soundguard
