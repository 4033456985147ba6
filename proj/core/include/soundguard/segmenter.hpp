#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "soundguard/audio_io.hpp"

namespace soundguard {

struct SegmentParams {
  double length_seconds = 20.0;
  double hop_seconds = 1.0;

  bool operator==(const SegmentParams&) const = default;
};

/// A window onto a parent clip. `samples` borrows the clip's buffer and is
/// only valid while that clip is alive.
struct Segment {
  std::string clip_id;
  std::size_t start_sample = 0;
  std::span<const float> samples;
  int sample_rate = kCanonicalSampleRate;
  ClassLabel label = ClassLabel::kNonPorn;

  double start_seconds() const { return static_cast<double>(start_sample) / sample_rate; }
  double length_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Start offsets (in samples) of every window. Windows start at 0, hop,
/// 2*hop, ... while they fit; a clip shorter than one window yields a single
/// window covering the whole clip. A trailing remainder is dropped.
std::vector<std::size_t> SegmentStarts(std::size_t n_samples, std::size_t window,
                                       std::size_t hop);

/// Cuts `clip` into overlapping windows that inherit its label. Throws
/// Error(kInvalidInput) for an empty clip or non-positive length/hop.
std::vector<Segment> SegmentClip(const AudioClip& clip, const SegmentParams& params);

/// Converts seconds to samples at `sample_rate`, rounding to nearest.
std::size_t SecondsToSamples(double seconds, int sample_rate);

}  // namespace soundguard
