#include "cli/run_config.hpp"

#include <cmath>
#include <initializer_list>
#include <string_view>

#include <json.hpp>

#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"
#include "soundguard/rng.hpp"

namespace soundguard::cli {

using nlohmann::json;

namespace {

void RequireKeys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) Fail(ErrorKind::kConfig, "config section '" + std::string(section) + "' must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto key : allowed) known |= item.key() == key;
    if (!known) {
      Fail(ErrorKind::kConfig, "unknown config key '" + std::string(section) + "." + item.key() + "'");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json SynthToJson(const SynthConfig& s) {
  return {{"clips_per_class", s.clips_per_class},
          {"min_duration", s.min_duration},
          {"max_duration", s.max_duration},
          {"sample_rate", s.sample_rate},
          {"segment_length", s.segment_length}};
}

void SynthFromJson(const json& j, SynthConfig& s) {
  RequireKeys(j, "synth", {"clips_per_class", "min_duration", "max_duration", "sample_rate", "segment_length"});
  Read(j, "clips_per_class", s.clips_per_class);
  Read(j, "min_duration", s.min_duration);
  Read(j, "max_duration", s.max_duration);
  Read(j, "sample_rate", s.sample_rate);
  Read(j, "segment_length", s.segment_length);
}

json FeatureConfigToJson(const FeatureConfig& c) {
  return {{"sample_rate", c.sample_rate}, {"frame_len", c.frame_len}, {"frame_hop", c.frame_hop},
          {"fft_size", c.fft_size},       {"n_mels", c.n_mels},       {"n_mfcc", c.n_mfcc},
          {"fmin", c.fmin},               {"fmax", c.fmax},           {"log_floor", c.log_floor}};
}

void FeatureConfigFromJson(const json& j, FeatureConfig& c) {
  RequireKeys(j, "features.frontend", {"sample_rate", "frame_len", "frame_hop", "fft_size", "n_mels", "n_mfcc",
                                       "fmin", "fmax", "log_floor"});
  Read(j, "sample_rate", c.sample_rate);
  Read(j, "frame_len", c.frame_len);
  Read(j, "frame_hop", c.frame_hop);
  Read(j, "fft_size", c.fft_size);
  Read(j, "n_mels", c.n_mels);
  Read(j, "n_mfcc", c.n_mfcc);
  Read(j, "fmin", c.fmin);
  Read(j, "fmax", c.fmax);
  Read(j, "log_floor", c.log_floor);
}

// The shuffle seed is derived from the top-level seed, so it is not part of
// this section.
json TrainToJson(const nn::TrainConfig& t) {
  json j = {{"batch_size", t.batch_size},
            {"lr_init", t.lr_init},
            {"lr_min", t.lr_min},
            {"lr_decay_factor", t.lr_decay_factor},
            {"plateau_patience", t.plateau_patience},
            {"early_stop_patience", t.early_stop_patience},
            {"max_epochs", t.max_epochs}};
  if (t.class_weights) {
    j["class_weights"] = {t.class_weights->negative, t.class_weights->positive};
  } else {
    j["class_weights"] = nullptr;
  }
  return j;
}

void TrainFromJson(const json& j, nn::TrainConfig& t) {
  RequireKeys(j, "train", {"batch_size", "lr_init", "lr_min", "lr_decay_factor", "plateau_patience",
                           "early_stop_patience", "max_epochs", "class_weights"});
  Read(j, "batch_size", t.batch_size);
  Read(j, "lr_init", t.lr_init);
  Read(j, "lr_min", t.lr_min);
  Read(j, "lr_decay_factor", t.lr_decay_factor);
  Read(j, "plateau_patience", t.plateau_patience);
  Read(j, "early_stop_patience", t.early_stop_patience);
  Read(j, "max_epochs", t.max_epochs);
  if (j.contains("class_weights")) {
    const auto& w = j.at("class_weights");
    if (w.is_null()) {
      t.class_weights.reset();
    } else {
      const auto pair = w.get<std::array<double, 2>>();
      t.class_weights = nn::ClassWeights{pair[0], pair[1]};
    }
  }
}

std::string PathString(const std::filesystem::path& p) { return p.generic_string(); }

}  // namespace

std::uint64_t RunConfig::synth_seed() const { return DeriveSeed(seed, 1); }
std::uint64_t RunConfig::split_seed() const { return DeriveSeed(seed, 2); }
std::uint64_t RunConfig::model_seed() const { return DeriveSeed(seed, 3); }
std::uint64_t RunConfig::shuffle_seed() const { return DeriveSeed(seed, 4); }

std::filesystem::path RunConfig::manifest_path() const {
  return manifest.empty() ? corpus_dir / "manifest.csv" : manifest;
}

void RunConfig::Validate() const {
  synth.Validate();
  feature_config.Validate();
  train.Validate();
  if (!(segment.length_seconds > 0.0) || !(segment.hop_seconds > 0.0)) {
    Fail(ErrorKind::kConfig, "segment length and hop must be positive");
  }
  double total = 0.0;
  for (double r : split_ratios) {
    if (!(r > 0.0)) Fail(ErrorKind::kConfig, "split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) Fail(ErrorKind::kConfig, "split ratios must sum to 1");
  if (methods.empty()) Fail(ErrorKind::kConfig, "at least one aggregation method is required");
}

RunConfig ParseRunConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    RequireKeys(j, "<root>", {"seed", "synth", "split", "features", "model", "train", "aggregation", "paths"});
    Read(j, "seed", c.seed);
    if (j.contains("synth")) SynthFromJson(j.at("synth"), c.synth);
    if (j.contains("split")) {
      RequireKeys(j.at("split"), "split", {"ratios"});
      Read(j.at("split"), "ratios", c.split_ratios);
    }
    if (j.contains("features")) {
      const auto& f = j.at("features");
      RequireKeys(f, "features", {"kind", "segment_length", "hop", "frontend"});
      if (f.contains("kind")) c.feature_kind = ParseFeatureKind(f.at("kind").get<std::string>());
      Read(f, "segment_length", c.segment.length_seconds);
      Read(f, "hop", c.segment.hop_seconds);
      if (f.contains("frontend")) FeatureConfigFromJson(f.at("frontend"), c.feature_config);
    }
    if (j.contains("model")) c.model_kind = nn::ParseModelKind(j.at("model").get<std::string>());
    if (j.contains("train")) TrainFromJson(j.at("train"), c.train);
    if (j.contains("aggregation")) {
      c.methods.clear();
      for (const auto& m : j.at("aggregation")) c.methods.push_back(ParseMethod(m.get<std::string>()));
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      RequireKeys(p, "paths", {"corpus", "manifest", "features", "models", "out_dir"});
      if (p.contains("corpus")) c.corpus_dir = p.at("corpus").get<std::string>();
      if (p.contains("manifest")) c.manifest = p.at("manifest").get<std::string>();
      if (p.contains("features")) c.features_dir = p.at("features").get<std::string>();
      if (p.contains("models")) {
        for (const auto& m : p.at("models")) c.models.emplace_back(m.get<std::string>());
      }
      if (p.contains("out_dir")) c.out_dir = p.at("out_dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    Fail(ErrorKind::kConfig, std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadFile(path));
}

std::string FormatRunConfig(const RunConfig& c) {
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(MethodKey(m));
  json models = json::array();
  for (const auto& m : c.models) models.push_back(PathString(m));
  const std::string kind = c.feature_kind == FeatureKind::kLogMel ? "log_mel" : "mfcc";
  const std::string model = c.model_kind == nn::ModelKind::kCnn ? "cnn" : "ffnn";
  json j = {{"seed", c.seed},
            {"synth", SynthToJson(c.synth)},
            {"split", {{"ratios", c.split_ratios}}},
            {"features",
             {{"kind", kind},
              {"segment_length", c.segment.length_seconds},
              {"hop", c.segment.hop_seconds},
              {"frontend", FeatureConfigToJson(c.feature_config)}}},
            {"model", model},
            {"train", TrainToJson(c.train)},
            {"aggregation", methods},
            {"paths",
             {{"corpus", PathString(c.corpus_dir)},
              {"manifest", PathString(c.manifest)},
              {"features", PathString(c.features_dir)},
              {"models", models},
              {"out_dir", PathString(c.out_dir)}}}};
  return j.dump(2) + "\n";
}

}  // namespace soundguard::cli
