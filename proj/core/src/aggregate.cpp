#include "soundguard/aggregate.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include <json.hpp>

#include "soundguard/error.hpp"
#include "soundguard/metrics.hpp"

namespace soundguard {

std::string_view MethodTitle(AggregationMethod method) {
  switch (method) {
    case AggregationMethod::kStandardThreshold: return "Standard threshold";
    case AggregationMethod::kSegmentMajority: return "Segment majority";
    case AggregationMethod::kValidationThreshold: return "Val-dependent threshold";
    case AggregationMethod::kVoting: return "Voting";
  }
  return "";
}

std::string_view MethodKey(AggregationMethod method) {
  switch (method) {
    case AggregationMethod::kStandardThreshold: return "standard_threshold";
    case AggregationMethod::kSegmentMajority: return "segment_majority";
    case AggregationMethod::kValidationThreshold: return "val_dependent_threshold";
    case AggregationMethod::kVoting: return "voting";
  }
  return "";
}

AggregationMethod ParseMethod(std::string_view key) {
  for (auto m : kAllMethods) {
    if (MethodKey(m) == key) return m;
  }
  Fail(ErrorKind::kConfig, "unknown aggregation method '" + std::string(key) + "'");
}

double AudioProbability(std::span<const double> segment_probs) {
  if (segment_probs.empty()) Fail(ErrorKind::kInvalidInput, "clip has no segment probabilities");
  std::vector<double> sorted(segment_probs.begin(), segment_probs.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double p : sorted) sum += p;
  return sum / static_cast<double>(sorted.size());
}

int StandardThreshold(std::span<const double> segment_probs) {
  return ValidationDependentThreshold(segment_probs, kStandardThresholdValue);
}

int ValidationDependentThreshold(std::span<const double> segment_probs, double threshold) {
  return AudioProbability(segment_probs) > threshold ? 1 : 0;
}

int SegmentVerdict(double probability) { return probability > kStandardThresholdValue ? 1 : 0; }

int SegmentMajority(std::span<const int> segment_verdicts) {
  if (segment_verdicts.empty()) Fail(ErrorKind::kInvalidInput, "clip has no segment verdicts");
  std::size_t ones = 0;
  for (int v : segment_verdicts) ones += v == 1 ? 1 : 0;
  return ones > segment_verdicts.size() - ones ? 1 : 0;
}

int SegmentMajorityFromProbs(std::span<const double> segment_probs) {
  std::vector<int> verdicts(segment_probs.size());
  std::transform(segment_probs.begin(), segment_probs.end(), verdicts.begin(), SegmentVerdict);
  return SegmentMajority(verdicts);
}

int Voting(int validation_threshold_verdict, int majority_verdict) {
  return validation_threshold_verdict == 1 && majority_verdict == 1 ? 1 : 0;
}

AudioPrediction Aggregate(const ClipPrediction& clip, double validation_threshold) {
  AudioPrediction out;
  out.clip_id = clip.clip_id;
  out.label = clip.label;
  out.audio_prob = AudioProbability(clip.segment_probs);
  const int standard = out.audio_prob > kStandardThresholdValue ? 1 : 0;
  const int majority = SegmentMajorityFromProbs(clip.segment_probs);
  const int vdt = out.audio_prob > validation_threshold ? 1 : 0;
  out.verdicts = {standard, majority, vdt, Voting(vdt, majority)};
  return out;
}

std::array<double, 10> ThresholdGrid() {
  std::array<double, 10> grid{};
  for (int k = 0; k < 10; ++k) grid[k] = k / 10.0;
  return grid;
}

namespace {

// Macro-F1 as an exact fraction num / den so that grid thresholds with equal
// scores compare equal regardless of floating-point rounding.
struct ExactScore {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

ExactScore ExactMacroF1(const Metrics& m) {
  // Per-class F1 = 2 hits / (2 hits + misses), 0 when nothing is there.
  auto f1 = [](std::uint64_t hits, std::uint64_t misses) {
    const std::uint64_t den = 2 * hits + misses;
    return den == 0 ? ExactScore{0, 1} : ExactScore{2 * hits, den};
  };
  const ExactScore a = f1(m.tp, m.fp + m.fn);
  const ExactScore b = f1(m.tn, m.fp + m.fn);
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

bool Greater(const ExactScore& x, const ExactScore& y) {
  __extension__ using Wide = unsigned __int128;
  return static_cast<Wide>(x.num) * y.den > static_cast<Wide>(y.num) * x.den;
}

}  // namespace

ThresholdSelection SelectThreshold(std::span<const ClipPrediction> validation) {
  bool has[2] = {false, false};
  for (const auto& c : validation) has[c.label == 1 ? 1 : 0] = true;
  if (!has[0] || !has[1]) {
    Fail(ErrorKind::kDegenerateData, "threshold selection needs validation clips of both classes");
  }
  std::vector<double> probs;
  std::vector<int> labels;
  for (const auto& c : validation) {
    probs.push_back(AudioProbability(c.segment_probs));
    labels.push_back(c.label);
  }
  ThresholdSelection sel;
  sel.grid = ThresholdGrid();
  ExactScore best{0, 1};
  bool first = true;
  std::vector<int> verdicts(probs.size());
  for (std::size_t k = 0; k < sel.grid.size(); ++k) {
    for (std::size_t i = 0; i < probs.size(); ++i) verdicts[i] = probs[i] > sel.grid[k] ? 1 : 0;
    const Metrics m = MacroF1(verdicts, labels);
    sel.macro_f1[k] = m.macro_f1;
    const ExactScore score = ExactMacroF1(m);
    if (first || Greater(score, best)) {
      best = score;
      sel.chosen = sel.grid[k];
      first = false;
    }
  }
  return sel;
}

std::string FormatPredictionsJsonl(std::span<const ClipPrediction> clips) {
  std::ostringstream out;
  for (const auto& c : clips) {
    nlohmann::json j = {{"clip_id", c.clip_id}, {"label", c.label}, {"segment_probs", c.segment_probs}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<ClipPrediction> ParsePredictionsJsonl(std::string_view text) {
  std::vector<ClipPrediction> clips;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ClipPrediction c;
      c.clip_id = j.at("clip_id").get<std::string>();
      c.label = j.at("label").get<int>();
      c.segment_probs = j.at("segment_probs").get<std::vector<double>>();
      if (c.label != 0 && c.label != 1) Fail(ErrorKind::kFormat, "label must be 0 or 1");
      if (c.segment_probs.empty()) Fail(ErrorKind::kFormat, "segment_probs is empty");
      for (double p : c.segment_probs) {
        if (!(p >= 0.0 && p <= 1.0)) Fail(ErrorKind::kFormat, "segment probability outside [0, 1]");
      }
      clips.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorKind::kFormat, "predictions line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      Fail(e.kind(), "predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return clips;
}

}  // namespace soundguard
