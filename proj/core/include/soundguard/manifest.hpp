#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "soundguard/audio_io.hpp"

namespace soundguard {

enum class Split : std::uint8_t { kTrain, kValid, kTest, kUnassigned };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct ManifestEntry {
  std::string clip_path;
  ClassLabel label = ClassLabel::kNonPorn;
  Split split = Split::kUnassigned;

  bool operator==(const ManifestEntry&) const = default;
};

/// CSV with header `path,label,split`. Relative clip paths resolve against
/// the manifest's directory.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> InSplit(Split split) const;
  std::size_t Count(ClassLabel label, Split split) const;
};

DatasetManifest ParseManifest(std::string_view csv);
std::string FormatManifest(const DatasetManifest& manifest);
DatasetManifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

inline constexpr std::size_t kMinClipsPerClass = 5;

/// Assigns whole clips to train/valid/test. Each class is shuffled by a
/// seeded RNG and cut by largest-remainder rounding of `ratios`, so each
/// class split differs from the exact proportion by less than one clip.
/// Throws Error(kInsufficientData) when a class has fewer than five clips.
DatasetManifest SplitDataset(const DatasetManifest& manifest,
                             std::array<double, 3> ratios, std::uint64_t seed);

/// Largest-remainder apportionment of `total` items by `ratios`. Ties in the
/// fractional part go to the earlier bucket.
std::array<std::size_t, 3> ApportionCounts(std::size_t total,
                                           std::array<double, 3> ratios);

}  // namespace soundguard
