#include "soundguard/segmenter.hpp"

#include <cmath>

#include "soundguard/error.hpp"

namespace soundguard {

std::size_t SecondsToSamples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

std::vector<std::size_t> SegmentStarts(std::size_t n_samples, std::size_t window,
                                       std::size_t hop) {
  if (window == 0 || hop == 0) Fail(ErrorKind::kInvalidInput, "segment window and hop must be positive");
  if (n_samples == 0) Fail(ErrorKind::kInvalidInput, "cannot segment an empty clip");
  if (n_samples < window) return {0};
  const std::size_t count = (n_samples - window) / hop + 1;
  std::vector<std::size_t> starts(count);
  for (std::size_t i = 0; i < count; ++i) starts[i] = i * hop;
  return starts;
}

std::vector<Segment> SegmentClip(const AudioClip& clip, const SegmentParams& params) {
  if (!(params.length_seconds > 0.0) || !(params.hop_seconds > 0.0)) {
    Fail(ErrorKind::kInvalidInput, "segment length and hop must be positive");
  }
  if (clip.samples.empty()) Fail(ErrorKind::kInvalidInput, "cannot segment empty clip " + clip.id);
  const std::size_t window = SecondsToSamples(params.length_seconds, clip.sample_rate);
  const std::size_t hop = SecondsToSamples(params.hop_seconds, clip.sample_rate);
  const std::span<const float> all(clip.samples);

  std::vector<Segment> segments;
  for (std::size_t start : SegmentStarts(all.size(), window, hop)) {
    Segment seg;
    seg.clip_id = clip.id;
    seg.start_sample = start;
    seg.samples = all.subspan(start, std::min(window, all.size() - start));
    seg.sample_rate = clip.sample_rate;
    seg.label = clip.label;
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace soundguard
