#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace soundguard {

/// Pipeline canonical sample rate.
inline constexpr int kCanonicalSampleRate = 16000;

enum class ClassLabel : std::uint8_t { kNonPorn = 0, kPorn = 1 };

/// Mono audio with amplitudes in [-1, 1].
struct AudioClip {
  std::string id;
  std::vector<float> samples;
  int sample_rate = kCanonicalSampleRate;
  ClassLabel label = ClassLabel::kNonPorn;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WavEncoding { kPcm16, kFloat32 };

/// Reads RIFF/WAVE PCM-16 or IEEE float-32 with one or two channels. Stereo
/// is averaged to mono. Throws Error(kFormat) on malformed files,
/// Error(kUnsupportedCodec) for other encodings and Error(kInvalidInput) for
/// files without samples. The clip id is the file stem.
AudioClip LoadWav(const std::filesystem::path& path);

/// Parses an in-memory WAV image; same rules as LoadWav.
AudioClip ParseWav(std::span<const std::uint8_t> bytes, std::string id);

/// Serializes interleaved samples. For PCM-16 the input is scaled by 32768,
/// rounded and saturated to the int16 range.
std::vector<std::uint8_t> EncodeWav(std::span<const float> interleaved,
                                    int sample_rate, int channels,
                                    WavEncoding encoding);

void WriteWav(const std::filesystem::path& path, const AudioClip& clip,
              WavEncoding encoding = WavEncoding::kPcm16);

/// Band-limited polyphase resampling with a Kaiser-windowed sinc
/// (beta 8.6, cutoff 0.9 x the lower Nyquist frequency). Output length is
/// round(n * target / source). Returns the input unchanged when the rates
/// match.
AudioClip Resample(const AudioClip& clip, int target_rate);

/// Same as Resample on a bare sample buffer.
std::vector<float> ResampleSamples(std::span<const float> samples,
                                   int source_rate, int target_rate);

}  // namespace soundguard
