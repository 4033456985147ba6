#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "soundguard/aggregate.hpp"
#include "soundguard/cmvn.hpp"
#include "soundguard/dataset.hpp"
#include "soundguard/dsp.hpp"
#include "soundguard/manifest.hpp"
#include "soundguard/nn/model.hpp"
#include "soundguard/nn/train.hpp"

namespace soundguard {

/// Loads a manifest entry (relative paths resolve against `base_dir`),
/// resamples it to `sample_rate` and attaches the entry's label.
AudioClip LoadClip(const ManifestEntry& entry, const std::filesystem::path& base_dir,
                   int sample_rate = kCanonicalSampleRate);

/// Train/valid/test segment features, normalized with statistics fitted on
/// the training split alone.
struct FeaturizedSplits {
  FeatureKind kind = FeatureKind::kLogMel;
  FeatureConfig config;
  SegmentParams segment;
  CmvnStats cmvn;
  SegmentDataset train;
  SegmentDataset valid;
  SegmentDataset test;

  const SegmentDataset& split(Split s) const;
  SegmentDataset& split(Split s);
};

/// Segments and featurizes every assigned clip, fits CMVN on train, applies
/// it to all three splits. Throws Error(kInsufficientData) if a split ends
/// up empty; unassigned entries are an Error(kConfig).
FeaturizedSplits FeaturizeManifest(const DatasetManifest& manifest,
                                   const std::filesystem::path& base_dir, FeatureKind kind,
                                   const FeatureConfig& config, const SegmentParams& segment);

/// Writes `<dir>/<split>/<clip_id>__<start_sample>.sgf` archives plus
/// `<dir>/features.json` (kind, config, segment params, CMVN stats).
void WriteFeatureSplits(const FeaturizedSplits& data, const std::filesystem::path& dir);
/// Reads back what WriteFeatureSplits produced.
FeaturizedSplits ReadFeatureSplits(const std::filesystem::path& dir);

/// Builds the spec for `kind` from the data shape, trains, then picks the
/// validation-dependent threshold on the validation clips and stores it
/// with the feature binding in the model metadata.
nn::TrainResult TrainOnSplits(nn::ModelKind kind, const FeaturizedSplits& data,
                              const nn::TrainConfig& config, std::uint64_t model_seed,
                              const std::function<void(const nn::EpochRecord&)>& on_epoch = {});

struct ClipReport {
  ClipPrediction prediction;
  AudioPrediction audio;
  std::vector<double> segment_starts;  // seconds
};

/// Resamples, segments and featurizes `clip` exactly as the model was
/// trained, applies the stored CMVN and aggregates with the stored
/// validation threshold.
ClipReport PredictClip(const nn::Model& model, const AudioClip& clip);

}  // namespace soundguard
