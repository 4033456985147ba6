#include "cli/commands.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "soundguard/audio_io.hpp"
#include "soundguard/error.hpp"
#include "soundguard/eval.hpp"
#include "soundguard/file_util.hpp"
#include "soundguard/manifest.hpp"
#include "soundguard/nn/model_io.hpp"
#include "soundguard/pipeline.hpp"

namespace soundguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Directory outputs are built next to their destination and renamed into
// place once complete.
class StagedDir {
 public:
  explicit StagedDir(fs::path target) : target_(std::move(target)) {
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    staging_ = parent / ("." + target_.filename().string() + ".partial");
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;
  ~StagedDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
  }

  const fs::path& path() const { return staging_; }

  void Commit() {
    std::error_code ec;
    fs::remove_all(target_, ec);
    fs::rename(staging_, target_, ec);
    if (ec) Fail(ErrorKind::kIo, "cannot move output into " + target_.string() + ": " + ec.message());
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool committed_ = false;
};

fs::path BaseDir(const fs::path& file) {
  return file.has_parent_path() ? file.parent_path() : fs::path(".");
}

std::string HistoryCsv(const std::vector<nn::EpochRecord>& history) {
  std::string csv = "epoch,learning_rate,train_loss,valid_loss,valid_macro_f1\n";
  char line[160];
  for (const auto& r : history) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9f,%.9f,%.9f\n", r.epoch, r.learning_rate, r.train_loss,
                  r.valid_loss, r.valid_macro_f1);
    csv += line;
  }
  return csv;
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
  return buf;
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitUsage;
    case ErrorKind::kFormat:
    case ErrorKind::kUnsupportedCodec:
    case ErrorKind::kUnsupportedVersion:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kDegenerateData:
    case ErrorKind::kIo: return kExitData;
    case ErrorKind::kTraining: return kExitInternal;
  }
  return kExitInternal;
}

void CmdSynth(const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  SynthConfig synth = config.synth;
  synth.seed = config.synth_seed();
  synth.Validate();
  StagedDir staged(out_dir);
  const auto manifest = GenerateCorpus(synth, staged.path());
  staged.Commit();
  out << "wrote " << manifest.entries.size() << " clips to " << (out_dir / "manifest.csv").string() << "\n";
}

void CmdPrepare(const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  const fs::path source = config.manifest_path();
  const DatasetManifest input = LoadManifest(source);
  DatasetManifest split = SplitDataset(input, config.split_ratios, config.split_seed());
  const fs::path from = fs::absolute(BaseDir(source)).lexically_normal();
  const fs::path to = fs::absolute(out_dir).lexically_normal();
  for (auto& e : split.entries) {
    if (fs::path(e.clip_path).is_absolute()) continue;
    e.clip_path = (from / e.clip_path).lexically_normal().lexically_relative(to).generic_string();
  }
  const fs::path target = out_dir / "manifest.csv";
  SaveManifest(target, split);
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    out << SplitName(s) << ": " << split.Count(ClassLabel::kPorn, s) << " porn, "
        << split.Count(ClassLabel::kNonPorn, s) << " non-porn\n";
  }
  out << "wrote " << target.string() << "\n";
}

void CmdFeaturize(const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  const fs::path source = config.manifest_path();
  const DatasetManifest manifest = LoadManifest(source);
  const auto data =
      FeaturizeManifest(manifest, BaseDir(source), config.feature_kind, config.feature_config, config.segment);
  StagedDir staged(out_dir);
  WriteFeatureSplits(data, staged.path());
  staged.Commit();
  out << FeatureSetName(data.kind, data.segment.length_seconds) << ": " << data.train.size() << " train, "
      << data.valid.size() << " valid, " << data.test.size() << " test segments in " << out_dir.string() << "\n";
}

void CmdTrain(const RunConfig& config, const fs::path& out_dir, std::ostream& out, std::ostream* progress) {
  const auto data = ReadFeatureSplits(config.features_dir);
  nn::TrainConfig train = config.train;
  train.seed = config.shuffle_seed();
  auto on_epoch = [&](const nn::EpochRecord& r) {
    if (progress == nullptr) return;
    char line[160];
    std::snprintf(line, sizeof(line), "epoch %zu lr %.2e train_loss %.5f valid_loss %.5f valid_f1 %.4f\n", r.epoch,
                  r.learning_rate, r.train_loss, r.valid_loss, r.valid_macro_f1);
    *progress << line << std::flush;
  };
  const auto result = TrainOnSplits(config.model_kind, data, train, config.model_seed(), on_epoch);

  RunConfig effective = config;
  effective.feature_kind = data.kind;
  effective.feature_config = data.config;
  effective.segment = data.segment;

  const json summary = {{"model", nn::ModelKindName(config.model_kind)},
                        {"feature_set", FeatureSetName(data.kind, data.segment.length_seconds)},
                        {"epochs", result.history.size()},
                        {"best_epoch", result.best_epoch},
                        {"validation_threshold", result.model.meta.validation_threshold},
                        {"class_weights", {result.class_weights.negative, result.class_weights.positive}},
                        {"train_config_digest", result.model.meta.train_config_digest}};
  fs::create_directories(out_dir);
  nn::SaveModel(result.model, out_dir / "model.sgm");
  WriteFileAtomic(out_dir / "history.csv", HistoryCsv(result.history));
  WriteFileAtomic(out_dir / "run_config.json", FormatRunConfig(effective));
  WriteFileAtomic(out_dir / "summary.json", summary.dump(2) + "\n");
  out << nn::ModelKindName(config.model_kind) << " on " << summary["feature_set"].get<std::string>() << ": best epoch "
      << result.best_epoch << " of " << result.history.size() << ", validation threshold "
      << result.model.meta.validation_threshold << "\nwrote " << (out_dir / "model.sgm").string() << "\n";
}

void CmdEvaluate(const RunConfig& config, const std::vector<fs::path>& features, const fs::path& out_dir,
                 std::ostream& out) {
  if (config.models.empty()) Fail(ErrorKind::kConfig, "evaluate needs at least one --model");
  if (features.size() != 1 && features.size() != config.models.size()) {
    Fail(ErrorKind::kConfig, "give one --features directory, or one per --model");
  }
  std::map<fs::path, FeaturizedSplits> cache;
  std::vector<RunResult> runs;
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    const fs::path& dir = features.size() == 1 ? features.front() : features[i];
    auto it = cache.find(dir);
    if (it == cache.end()) it = cache.emplace(dir, ReadFeatureSplits(dir)).first;
    const FeaturizedSplits& data = it->second;
    const nn::Model model = nn::LoadModel(config.models[i]);
    if (model.meta.feature_kind != data.kind || model.meta.feature_config != data.config ||
        model.meta.segment != data.segment || model.meta.cmvn != data.cmvn) {
      Fail(ErrorKind::kConfig, config.models[i].string() + " was not trained on the features in " + dir.string());
    }
    runs.push_back(EvaluateRun(model, data.valid, data.test));
    const std::string stem = "run" + std::to_string(i + 1);
    for (Split s : {Split::kValid, Split::kTest}) {
      const auto& split = data.split(s);
      const auto clips = GroupByClip(split, PredictSegments(model, split));
      WriteFileAtomic(out_dir / "predictions" / (stem + "_" + std::string(SplitName(s)) + ".jsonl"),
                      FormatPredictionsJsonl(clips));
    }
  }
  const auto means = MethodMeanReport(runs);
  WriteFileAtomic(out_dir / "segment_table.md", SegmentTableMarkdown(runs));
  WriteFileAtomic(out_dir / "segment_table.csv", SegmentTableCsv(runs));
  WriteFileAtomic(out_dir / "audio_table.md", AudioTableMarkdown(runs));
  WriteFileAtomic(out_dir / "audio_table.csv", AudioTableCsv(runs));
  WriteFileAtomic(out_dir / "method_means.md", MethodMeanMarkdown(means));
  WriteFileAtomic(out_dir / "method_means.csv", MethodMeanCsv(means));

  out << SegmentTableMarkdown(runs) << "\n" << AudioTableMarkdown(runs) << "\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out << "run" << i + 1 << " " << runs[i].model << " " << runs[i].feature_set << " (threshold "
        << runs[i].validation_threshold << "):";
    for (auto m : config.methods) {
      out << " " << MethodKey(m) << "=" << Percent(runs[i].audio_f1[static_cast<std::size_t>(m)]);
    }
    out << "\n";
  }
  out << "wrote reports to " << out_dir.string() << "\n";
}

void CmdPredict(const fs::path& model_path, const fs::path& wav, const fs::path& out_dir, std::ostream& out) {
  const nn::Model model = nn::LoadModel(model_path);
  const AudioClip clip = LoadWav(wav);
  const ClipReport report = PredictClip(model, clip);
  json segments = json::array();
  for (std::size_t i = 0; i < report.prediction.segment_probs.size(); ++i) {
    segments.push_back({{"start_seconds", report.segment_starts[i]},
                        {"probability", report.prediction.segment_probs[i]}});
  }
  json verdicts = json::object();
  for (auto m : kAllMethods) verdicts[std::string(MethodKey(m))] = report.audio.verdict(m);
  const json result = {{"clip", clip.id},
                       {"duration_seconds", static_cast<double>(clip.samples.size()) / clip.sample_rate},
                       {"segments", segments},
                       {"audio_probability", report.audio.audio_prob},
                       {"validation_threshold", model.meta.validation_threshold},
                       {"verdicts", verdicts}};
  const std::string text = result.dump(2) + "\n";
  if (!out_dir.empty()) WriteFileAtomic(out_dir / "prediction.json", text);
  out << text;
}

}  // namespace soundguard::cli
