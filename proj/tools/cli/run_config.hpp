#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "soundguard/aggregate.hpp"
#include "soundguard/features.hpp"
#include "soundguard/nn/model.hpp"
#include "soundguard/nn/train.hpp"
#include "soundguard/segmenter.hpp"
#include "soundguard/synth.hpp"

namespace soundguard::cli {

/// Everything one experiment needs. Loaded from a JSON file, then
/// individual fields are overridden by command-line flags.
struct RunConfig {
  std::uint64_t seed = 0;

  SynthConfig synth;
  std::array<double, 3> split_ratios{0.6, 0.2, 0.2};

  FeatureKind feature_kind = FeatureKind::kLogMel;
  FeatureConfig feature_config;
  SegmentParams segment{20.0, 1.0};

  nn::ModelKind model_kind = nn::ModelKind::kCnn;
  nn::TrainConfig train;
  std::vector<AggregationMethod> methods{kAllMethods.begin(), kAllMethods.end()};

  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path manifest;  // defaults to <corpus_dir>/manifest.csv
  std::filesystem::path features_dir = "features";
  std::vector<std::filesystem::path> models;
  std::filesystem::path out_dir;

  // Every random stream is derived from `seed` so one number pins a run.
  std::uint64_t synth_seed() const;
  std::uint64_t split_seed() const;
  std::uint64_t model_seed() const;
  std::uint64_t shuffle_seed() const;

  std::filesystem::path manifest_path() const;

  /// Throws Error(kConfig) on inconsistent values.
  void Validate() const;
};

/// Missing keys keep their defaults; unknown keys are an Error(kConfig) so
/// typos do not silently fall back.
RunConfig ParseRunConfig(std::string_view json_text);
RunConfig LoadRunConfig(const std::filesystem::path& path);
/// Pretty-printed, keys sorted, trailing newline.
std::string FormatRunConfig(const RunConfig& config);

}  // namespace soundguard::cli
