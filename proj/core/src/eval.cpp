#include "soundguard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "soundguard/error.hpp"
#include "soundguard/nn/train.hpp"

namespace soundguard {
namespace {

std::string Percent(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * f1);
  return buf;
}

std::string Fixed(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", f1);
  return buf;
}

}  // namespace

std::vector<double> PredictSegments(const nn::Model& model, const SegmentDataset& split) {
  if (split.kind() != model.meta.feature_kind && !split.empty()) {
    Fail(ErrorKind::kConfig, std::string("model expects ") +
                                 std::string(FeatureKindName(model.meta.feature_kind)) +
                                 " features, split holds " + std::string(FeatureKindName(split.kind())));
  }
  return nn::Forward(model, split.Views());
}

std::vector<ClipPrediction> GroupByClip(const SegmentDataset& split, std::span<const double> probs) {
  if (probs.size() != split.size()) Fail(ErrorKind::kInvalidInput, "one probability per segment required");
  std::vector<ClipPrediction> clips;
  for (const auto& range : split.clips()) {
    ClipPrediction c;
    c.clip_id = range.clip_id;
    c.label = range.label;
    c.segment_probs.assign(probs.begin() + range.first, probs.begin() + range.last);
    clips.push_back(std::move(c));
  }
  return clips;
}

Metrics EvaluateSegments(std::span<const double> probs, std::span<const int> labels) {
  return MacroF1(nn::ThresholdVerdicts(probs), labels);
}

Metrics EvaluateSegments(const nn::Model& model, const SegmentDataset& split) {
  const auto probs = PredictSegments(model, split);
  return EvaluateSegments(probs, split.Labels());
}

Metrics EvaluateAudios(std::span<const ClipPrediction> clips, AggregationMethod method,
                       double validation_threshold) {
  std::vector<int> verdicts, labels;
  for (const auto& c : clips) {
    verdicts.push_back(Aggregate(c, validation_threshold).verdict(method));
    labels.push_back(c.label);
  }
  return MacroF1(verdicts, labels);
}

Metrics EvaluateAudios(const nn::Model& model, const SegmentDataset& split,
                       AggregationMethod method, double validation_threshold) {
  const auto probs = PredictSegments(model, split);
  const auto clips = GroupByClip(split, probs);
  return EvaluateAudios(clips, method, validation_threshold);
}

std::string FeatureSetName(FeatureKind kind, double segment_seconds) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%g", std::string(FeatureKindName(kind)).c_str(), segment_seconds);
  return buf;
}

RunResult EvaluateRun(const nn::Model& model, const SegmentDataset& valid, const SegmentDataset& test) {
  RunResult run;
  run.model = std::string(nn::ModelKindName(model.spec.kind));
  run.feature_set = FeatureSetName(model.meta.feature_kind, model.meta.segment.length_seconds);

  const auto valid_probs = PredictSegments(model, valid);
  const auto test_probs = PredictSegments(model, test);
  run.valid_segment_f1 = EvaluateSegments(valid_probs, valid.Labels()).macro_f1;
  run.test_segment_f1 = EvaluateSegments(test_probs, test.Labels()).macro_f1;

  const auto valid_clips = GroupByClip(valid, valid_probs);
  run.validation_threshold = SelectThreshold(valid_clips).chosen;
  const auto test_clips = GroupByClip(test, test_probs);
  for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
    run.audio_f1[m] = EvaluateAudios(test_clips, kAllMethods[m], run.validation_threshold).macro_f1;
  }
  return run;
}

std::vector<MethodMean> MethodMeanReport(std::span<const RunResult> runs) {
  if (runs.empty()) Fail(ErrorKind::kInvalidInput, "no runs to summarize");
  std::vector<MethodMean> means;
  for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.audio_f1[m];
    means.push_back({kAllMethods[m], sum / static_cast<double>(runs.size())});
  }
  std::sort(means.begin(), means.end(), [](const MethodMean& a, const MethodMean& b) {
    if (a.mean_f1 != b.mean_f1) return a.mean_f1 > b.mean_f1;
    return MethodTitle(a.method) < MethodTitle(b.method);
  });
  return means;
}

std::string SegmentTableMarkdown(std::span<const RunResult> runs) {
  std::ostringstream out;
  out << "| Model | Feature set | Valid F1-score | Test F1-score |\n";
  out << "|---|---|---:|---:|\n";
  for (const auto& r : runs) {
    out << "| " << r.model << " | " << r.feature_set << " | " << Percent(r.valid_segment_f1) << " | "
        << Percent(r.test_segment_f1) << " |\n";
  }
  return out.str();
}

std::string SegmentTableCsv(std::span<const RunResult> runs) {
  std::ostringstream out;
  out << "Model,Feature set,Valid F1-score,Test F1-score\n";
  for (const auto& r : runs) {
    out << r.model << ',' << r.feature_set << ',' << Fixed(r.valid_segment_f1) << ','
        << Fixed(r.test_segment_f1) << '\n';
  }
  return out.str();
}

std::string AudioTableMarkdown(std::span<const RunResult> runs) {
  std::ostringstream out;
  out << "| Model | Feature set";
  for (auto m : kAllMethods) out << " | " << MethodTitle(m);
  out << " |\n|---|---|---:|---:|---:|---:|\n";
  for (const auto& r : runs) {
    out << "| " << r.model << " | " << r.feature_set;
    for (double f1 : r.audio_f1) out << " | " << Percent(f1);
    out << " |\n";
  }
  return out.str();
}

std::string AudioTableCsv(std::span<const RunResult> runs) {
  std::ostringstream out;
  out << "Model,Feature set";
  for (auto m : kAllMethods) out << ',' << MethodTitle(m);
  out << '\n';
  for (const auto& r : runs) {
    out << r.model << ',' << r.feature_set;
    for (double f1 : r.audio_f1) out << ',' << Fixed(f1);
    out << '\n';
  }
  return out.str();
}

std::string MethodMeanMarkdown(std::span<const MethodMean> means) {
  std::ostringstream out;
  out << "| Rank | Method | Mean F1-score |\n|---:|---|---:|\n";
  for (std::size_t i = 0; i < means.size(); ++i) {
    out << "| " << i + 1 << " | " << MethodTitle(means[i].method) << " | " << Percent(means[i].mean_f1) << " |\n";
  }
  return out.str();
}

std::string MethodMeanCsv(std::span<const MethodMean> means) {
  std::ostringstream out;
  out << "Rank,Method,Mean F1-score\n";
  for (std::size_t i = 0; i < means.size(); ++i) {
    out << i + 1 << ',' << MethodTitle(means[i].method) << ',' << Fixed(means[i].mean_f1) << '\n';
  }
  return out.str();
}

}  // namespace soundguard
