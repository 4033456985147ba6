#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "soundguard/audio_io.hpp"
#include "soundguard/features.hpp"

namespace soundguard {

/// One segment's features on disk.
///
/// Layout (little-endian): "SGF1", kind u8, normalized u8, frames u32,
/// dims u32, label u8, clip-id byte length u32, clip-id UTF-8 bytes, then
/// frames * dims float32 values row-major.
struct FeatureArchive {
  std::string clip_id;
  ClassLabel label = ClassLabel::kNonPorn;
  FeatureMatrix features;
};

std::vector<std::uint8_t> EncodeFeatureArchive(const std::string& clip_id, ClassLabel label,
                                               const FeatureView& view, FeatureKind kind,
                                               bool normalized);
FeatureArchive DecodeFeatureArchive(std::span<const std::uint8_t> bytes);

void WriteFeatureArchive(const std::filesystem::path& path, const std::string& clip_id,
                         ClassLabel label, const FeatureView& view, FeatureKind kind,
                         bool normalized);
FeatureArchive ReadFeatureArchive(const std::filesystem::path& path);

}  // namespace soundguard
