#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "soundguard/audio_io.hpp"
#include "soundguard/manifest.hpp"

namespace soundguard {

/// Synthetic two-class corpus. Class 1 clips interleave amplitude-modulated
/// band-limited noise bursts (0.3-3 Hz modulation), low voiced tones with
/// vibrato, and silence. Class 0 clips are sustained harmonic chord
/// progressions over steady wideband noise. Every clip gets a random gain
/// and a faint noise floor.
struct SynthConfig {
  std::size_t clips_per_class = 40;
  double min_duration = 60.0;  // seconds
  double max_duration = 90.0;
  int sample_rate = kCanonicalSampleRate;
  std::uint64_t seed = 0;
  /// Shortest segment the corpus must support; min_duration may not be below it.
  double segment_length = 20.0;

  /// Throws Error(kConfig) on bad values.
  void Validate() const;
};

/// Clip `index` of class `label`. Seeded from (config.seed, label, index)
/// only, so clips can be generated in any order or in parallel.
AudioClip GenerateClip(const SynthConfig& config, ClassLabel label, std::size_t index);

/// Writes `<out_dir>/wav/<id>.wav` (PCM-16) for every clip plus
/// `<out_dir>/manifest.csv` with unassigned splits; returns the manifest.
DatasetManifest GenerateCorpus(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace soundguard
