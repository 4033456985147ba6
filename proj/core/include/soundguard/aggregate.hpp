#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soundguard {

/// The four segment-to-audio rules, in report column order.
enum class AggregationMethod {
  kStandardThreshold,
  kSegmentMajority,
  kValidationThreshold,
  kVoting,
};

inline constexpr std::array<AggregationMethod, 4> kAllMethods = {
    AggregationMethod::kStandardThreshold, AggregationMethod::kSegmentMajority,
    AggregationMethod::kValidationThreshold, AggregationMethod::kVoting};

/// Column title, e.g. "Val-dependent threshold".
std::string_view MethodTitle(AggregationMethod method);
/// Identifier, e.g. "val_dependent_threshold".
std::string_view MethodKey(AggregationMethod method);
AggregationMethod ParseMethod(std::string_view key);

inline constexpr double kStandardThresholdValue = 0.5;

/// Mean segment probability. Values are summed in ascending order so the
/// result is independent of segment order. Throws Error(kInvalidInput) on an
/// empty list.
double AudioProbability(std::span<const double> segment_probs);

/// 1 iff the mean segment probability is strictly greater than 0.5.
int StandardThreshold(std::span<const double> segment_probs);

/// 1 iff the mean segment probability is strictly greater than `threshold`.
int ValidationDependentThreshold(std::span<const double> segment_probs, double threshold);

/// Segment verdict used by the majority rule: probability > 0.5.
int SegmentVerdict(double probability);

/// 1 iff strictly more segments are 1 than 0; a tie is 0.
int SegmentMajority(std::span<const int> segment_verdicts);
int SegmentMajorityFromProbs(std::span<const double> segment_probs);

/// 1 iff both inputs are 1.
int Voting(int validation_threshold_verdict, int majority_verdict);

/// One clip's segment-level output.
struct ClipPrediction {
  std::string clip_id;
  int label = 0;
  std::vector<double> segment_probs;
};

/// A clip with its verdict under every method.
struct AudioPrediction {
  std::string clip_id;
  int label = 0;
  double audio_prob = 0.0;
  std::array<int, 4> verdicts{};  // indexed like kAllMethods

  int verdict(AggregationMethod m) const { return verdicts[static_cast<std::size_t>(m)]; }
};

AudioPrediction Aggregate(const ClipPrediction& clip, double validation_threshold);

/// Threshold grid {0.0, 0.1, ..., 0.9}, computed as k / 10.
std::array<double, 10> ThresholdGrid();

struct ThresholdSelection {
  double chosen = 0.5;
  std::array<double, 10> grid{};
  std::array<double, 10> macro_f1{};  // audio-level validation score per grid value
};

/// Scores every grid threshold by audio-level macro-F1 on the validation
/// clips (verdict = mean prob > t) and keeps the best, ties to the smaller
/// threshold. Throws Error(kDegenerateData) unless both classes appear.
ThresholdSelection SelectThreshold(std::span<const ClipPrediction> validation);

/// JSON-lines interchange: one {"clip_id", "label", "segment_probs"} object
/// per line.
std::string FormatPredictionsJsonl(std::span<const ClipPrediction> clips);
std::vector<ClipPrediction> ParsePredictionsJsonl(std::string_view text);

}  // namespace soundguard
