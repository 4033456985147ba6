#include "soundguard/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "json_codec.hpp"
#include "soundguard/error.hpp"
#include "soundguard/eval.hpp"
#include "soundguard/feature_archive.hpp"
#include "soundguard/file_util.hpp"

namespace soundguard {

namespace fs = std::filesystem;

AudioClip LoadClip(const ManifestEntry& entry, const fs::path& base_dir, int sample_rate) {
  const fs::path path = fs::path(entry.clip_path).is_absolute() ? fs::path(entry.clip_path)
                                                                : base_dir / entry.clip_path;
  AudioClip clip = Resample(LoadWav(path), sample_rate);
  clip.label = entry.label;
  return clip;
}

const SegmentDataset& FeaturizedSplits::split(Split s) const {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kValid: return valid;
    case Split::kTest: return test;
    case Split::kUnassigned: break;
  }
  Fail(ErrorKind::kInvalidInput, "no dataset for unassigned split");
}

SegmentDataset& FeaturizedSplits::split(Split s) {
  return const_cast<SegmentDataset&>(std::as_const(*this).split(s));
}

namespace {

void RequireNonEmpty(const FeaturizedSplits& data) {
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    if (data.split(s).empty()) {
      Fail(ErrorKind::kInsufficientData, std::string(SplitName(s)) + " split has no segments");
    }
  }
}

}  // namespace

FeaturizedSplits FeaturizeManifest(const DatasetManifest& manifest, const fs::path& base_dir,
                                   FeatureKind kind, const FeatureConfig& config,
                                   const SegmentParams& segment) {
  config.Validate();
  FeaturizedSplits data;
  data.kind = kind;
  data.config = config;
  data.segment = segment;
  const FeatureExtractor extractor(config);
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    for (const ManifestEntry* entry : manifest.InSplit(s)) {
      const AudioClip clip = LoadClip(*entry, base_dir, config.sample_rate);
      data.split(s).AddClip(FeaturizeClip(clip, segment, extractor, kind));
    }
  }
  if (!manifest.InSplit(Split::kUnassigned).empty()) {
    Fail(ErrorKind::kConfig, "manifest has unassigned clips; run the split first");
  }
  RequireNonEmpty(data);

  CmvnAccumulator acc(kind);
  data.train.AccumulateCmvn(acc);
  data.cmvn = acc.Finish();
  data.train.ApplyCmvn(data.cmvn);
  data.valid.ApplyCmvn(data.cmvn);
  data.test.ApplyCmvn(data.cmvn);
  return data;
}

void WriteFeatureSplits(const FeaturizedSplits& data, const fs::path& dir) {
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    const fs::path split_dir = dir / SplitName(s);
    fs::create_directories(split_dir);
    for (const auto& seg : data.split(s).segments()) {
      char name[64];
      std::snprintf(name, sizeof(name), "__%012zu.sgf", seg.start_sample);
      WriteFeatureArchive(split_dir / (seg.clip_id + name), seg.clip_id,
                          static_cast<ClassLabel>(seg.label), seg.features, data.kind,
                          data.split(s).normalized());
    }
  }
  const nlohmann::json index = {{"feature_kind", FeatureKindName(data.kind)},
                                {"feature_config", detail::ToJson(data.config)},
                                {"segment_length_seconds", data.segment.length_seconds},
                                {"segment_hop_seconds", data.segment.hop_seconds},
                                {"cmvn", detail::ToJson(data.cmvn)}};
  WriteFileAtomic(dir / "features.json", index.dump(2) + "\n");
}

FeaturizedSplits ReadFeatureSplits(const fs::path& dir) {
  FeaturizedSplits data;
  try {
    const auto index = nlohmann::json::parse(ReadFile(dir / "features.json"));
    data.kind = ParseFeatureKind(index.at("feature_kind").get<std::string>());
    data.config = detail::FeatureConfigFromJson(index.at("feature_config"));
    data.segment.length_seconds = index.at("segment_length_seconds").get<double>();
    data.segment.hop_seconds = index.at("segment_hop_seconds").get<double>();
    data.cmvn = detail::CmvnFromJson(index.at("cmvn"));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("bad features.json: ") + e.what());
  }
  for (Split s : {Split::kTrain, Split::kValid, Split::kTest}) {
    const fs::path split_dir = dir / SplitName(s);
    if (!fs::is_directory(split_dir)) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(split_dir)) {
      if (e.path().extension() == ".sgf") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string stem = f.stem().string();
      const auto sep = stem.rfind("__");
      if (sep == std::string::npos) Fail(ErrorKind::kFormat, "unexpected archive name " + f.string());
      const std::size_t start = std::stoull(stem.substr(sep + 2));
      FeatureArchive archive = ReadFeatureArchive(f);
      if (archive.features.kind != data.kind) {
        Fail(ErrorKind::kFormat, "archive " + f.string() + " has the wrong feature kind");
      }
      data.split(s).AddArchive(std::move(archive), start);
    }
  }
  RequireNonEmpty(data);
  return data;
}

nn::TrainResult TrainOnSplits(nn::ModelKind kind, const FeaturizedSplits& data,
                              const nn::TrainConfig& config, std::uint64_t model_seed,
                              const std::function<void(const nn::EpochRecord&)>& on_epoch) {
  RequireNonEmpty(data);
  const FeatureView first = data.train.segments().front().features;
  const nn::ModelSpec spec = kind == nn::ModelKind::kFfnn
                                 ? nn::ModelSpec::Ffnn(first.dims, model_seed)
                                 : nn::ModelSpec::Cnn(first.frames, first.dims, model_seed);
  nn::Model initial = nn::InitModel(spec);
  initial.meta.feature_kind = data.kind;
  initial.meta.feature_config = data.config;
  initial.meta.segment = data.segment;
  initial.meta.cmvn = data.cmvn;

  const auto train_examples = data.train.Examples();
  const auto valid_examples = data.valid.Examples();
  nn::TrainResult result = nn::Train(initial, train_examples, valid_examples, config, on_epoch);

  const auto valid_probs = nn::Forward(result.model, data.valid.Views());
  const auto valid_clips = GroupByClip(data.valid, valid_probs);
  result.model.meta.validation_threshold = SelectThreshold(valid_clips).chosen;
  return result;
}

ClipReport PredictClip(const nn::Model& model, const AudioClip& clip) {
  const nn::ModelMetadata& meta = model.meta;
  const AudioClip resampled = Resample(clip, meta.feature_config.sample_rate);
  const FeatureExtractor extractor(meta.feature_config);
  ClipFeatures features = FeaturizeClip(resampled, meta.segment, extractor, meta.feature_kind);

  SegmentDataset dataset;
  dataset.AddClip(std::move(features));
  dataset.ApplyCmvn(meta.cmvn);

  ClipReport report;
  report.prediction.clip_id = clip.id;
  report.prediction.label = static_cast<int>(clip.label);
  report.prediction.segment_probs = nn::Forward(model, dataset.Views());
  for (const auto& seg : dataset.segments()) {
    report.segment_starts.push_back(static_cast<double>(seg.start_sample) / resampled.sample_rate);
  }
  report.audio = Aggregate(report.prediction, meta.validation_threshold);
  return report;
}

}  // namespace soundguard
