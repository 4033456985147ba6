#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "soundguard/aggregate.hpp"
#include "soundguard/dataset.hpp"
#include "soundguard/metrics.hpp"
#include "soundguard/nn/model.hpp"

namespace soundguard {

/// Forward pass over every segment of the split, in dataset order.
std::vector<double> PredictSegments(const nn::Model& model, const SegmentDataset& split);

/// Groups per-segment probabilities into per-clip records.
std::vector<ClipPrediction> GroupByClip(const SegmentDataset& split, std::span<const double> probs);

/// Segment-level macro-F1 with verdict = probability > 0.5.
Metrics EvaluateSegments(std::span<const double> probs, std::span<const int> labels);
Metrics EvaluateSegments(const nn::Model& model, const SegmentDataset& split);

/// Audio-level macro-F1 under one aggregation method.
Metrics EvaluateAudios(std::span<const ClipPrediction> clips, AggregationMethod method,
                       double validation_threshold);
Metrics EvaluateAudios(const nn::Model& model, const SegmentDataset& split,
                       AggregationMethod method, double validation_threshold);

/// "log-mel-20", "mfcc-60", ...
std::string FeatureSetName(FeatureKind kind, double segment_seconds);

/// One (model, feature set) row of the result tables.
struct RunResult {
  std::string model;        // "FFNN" / "CNN"
  std::string feature_set;  // "log-mel-20"
  double valid_segment_f1 = 0.0;
  double test_segment_f1 = 0.0;
  double validation_threshold = 0.5;
  std::array<double, 4> audio_f1{};  // test macro-F1, indexed like kAllMethods
};

/// Scores a trained model: segment F1 on valid and test, threshold chosen
/// on valid clips, audio F1 on test clips for all four methods.
RunResult EvaluateRun(const nn::Model& model, const SegmentDataset& valid,
                      const SegmentDataset& test);

struct MethodMean {
  AggregationMethod method = AggregationMethod::kStandardThreshold;
  double mean_f1 = 0.0;
};

/// Mean audio-level F1 per method across runs, highest first, ties by
/// method title. Throws Error(kInvalidInput) on no runs.
std::vector<MethodMean> MethodMeanReport(std::span<const RunResult> runs);

/// Segment-level table: Model | Feature set | Valid F1-score | Test F1-score.
std::string SegmentTableMarkdown(std::span<const RunResult> runs);
std::string SegmentTableCsv(std::span<const RunResult> runs);
/// Audio-level table: Model | Feature set | Standard threshold |
/// Segment majority | Val-dependent threshold | Voting.
std::string AudioTableMarkdown(std::span<const RunResult> runs);
std::string AudioTableCsv(std::span<const RunResult> runs);
std::string MethodMeanMarkdown(std::span<const MethodMean> means);
std::string MethodMeanCsv(std::span<const MethodMean> means);

}  // namespace soundguard
