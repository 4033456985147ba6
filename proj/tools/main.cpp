// soundguard command-line front end.
//
//   soundguard synth      --out-dir corpus
//   soundguard prepare    --manifest corpus/manifest.csv --out-dir corpus
//   soundguard featurize  --manifest corpus/manifest.csv --features log_mel --out-dir feats
//   soundguard train      --features-dir feats --model cnn --out-dir run
//   soundguard evaluate   --model run/model.sgm --features-dir feats --out-dir report
//   soundguard predict    --model run/model.sgm clip.wav
//
// Every subcommand accepts --config, --seed and --out-dir; explicit flags
// override the config file.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "soundguard/error.hpp"

namespace sg = soundguard;
namespace cli = soundguard::cli;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  std::string manifest;
  std::optional<std::string> features_kind;
  std::optional<double> segment_length;
  std::optional<double> hop;
  std::vector<double> ratios;

  std::optional<std::size_t> clips_per_class;
  std::optional<double> min_duration;
  std::optional<double> max_duration;

  std::vector<std::string> features_dirs;
  std::optional<std::string> model_kind;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::vector<std::string> methods;
  bool quiet = false;

  std::vector<std::string> models;
  std::string predict_model;
  std::string wav;
};

void AddCommon(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Master seed for every random stream");
  sub->add_option("--out-dir", f.out_dir, "Output directory");
}

cli::RunConfig Resolve(const Flags& f) {
  cli::RunConfig c = f.config.empty() ? cli::RunConfig{} : cli::LoadRunConfig(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (f.features_kind) c.feature_kind = sg::ParseFeatureKind(*f.features_kind);
  if (f.segment_length) c.segment.length_seconds = *f.segment_length;
  if (f.hop) c.segment.hop_seconds = *f.hop;
  if (!f.ratios.empty()) {
    if (f.ratios.size() != 3) sg::Fail(sg::ErrorKind::kConfig, "--ratios takes three values");
    c.split_ratios = {f.ratios[0], f.ratios[1], f.ratios[2]};
  }
  if (f.clips_per_class) c.synth.clips_per_class = *f.clips_per_class;
  if (f.min_duration) c.synth.min_duration = *f.min_duration;
  if (f.max_duration) c.synth.max_duration = *f.max_duration;
  if (f.segment_length) c.synth.segment_length = std::min(c.synth.segment_length, *f.segment_length);
  if (f.features_dirs.size() == 1) c.features_dir = f.features_dirs.front();
  if (f.model_kind) c.model_kind = sg::nn::ParseModelKind(*f.model_kind);
  if (f.max_epochs) c.train.max_epochs = *f.max_epochs;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.lr) c.train.lr_init = *f.lr;
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : f.methods) c.methods.push_back(sg::ParseMethod(m));
  }
  if (!f.models.empty()) c.models.assign(f.models.begin(), f.models.end());
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  c.Validate();
  return c;
}

std::filesystem::path OutDir(const cli::RunConfig& c, const char* fallback) {
  return c.out_dir.empty() ? std::filesystem::path(fallback) : c.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soundguard: segment-level audio classification and clip aggregation"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "Generate the synthetic two-class corpus");
  AddCommon(synth, f);
  synth->add_option("--clips-per-class", f.clips_per_class, "Clips per class");
  synth->add_option("--min-duration", f.min_duration, "Shortest clip, seconds");
  synth->add_option("--max-duration", f.max_duration, "Longest clip, seconds");
  synth->add_option("--segment-length", f.segment_length, "Segment length the corpus must support, seconds");

  auto* prepare = app.add_subcommand("prepare", "Split a manifest into train/valid/test by clip");
  AddCommon(prepare, f);
  prepare->add_option("--manifest", f.manifest, "Input manifest CSV");
  prepare->add_option("--ratios", f.ratios, "Train,valid,test fractions")->delimiter(',')->expected(3);

  auto* featurize = app.add_subcommand("featurize", "Segment clips, extract features, fit CMVN on train");
  AddCommon(featurize, f);
  featurize->add_option("--manifest", f.manifest, "Prepared manifest CSV");
  featurize->add_option("--features", f.features_kind, "log_mel or mfcc");
  featurize->add_option("--segment-length", f.segment_length, "Segment length, seconds");
  featurize->add_option("--hop", f.hop, "Segment hop, seconds");

  auto* train = app.add_subcommand("train", "Train one model on a feature directory");
  AddCommon(train, f);
  train->add_option("--features-dir", f.features_dirs, "Feature directory from featurize")->expected(1);
  train->add_option("--model", f.model_kind, "ffnn or cnn");
  train->add_option("--max-epochs", f.max_epochs, "Epoch limit");
  train->add_option("--batch-size", f.batch_size, "Mini-batch size");
  train->add_option("--lr", f.lr, "Initial learning rate");
  train->add_flag("--quiet", f.quiet, "Do not print per-epoch progress");

  auto* evaluate = app.add_subcommand("evaluate", "Score models and write the result tables");
  AddCommon(evaluate, f);
  evaluate->add_option("--model", f.models, "Model files (repeatable)")->expected(1, 64);
  evaluate->add_option("--features-dir", f.features_dirs, "One feature directory, or one per model")->expected(1, 64);
  evaluate->add_option("--methods", f.methods, "Aggregation methods to summarize")->delimiter(',');

  auto* predict = app.add_subcommand("predict", "Classify one WAV file");
  AddCommon(predict, f);
  predict->add_option("--model", f.predict_model, "Model file")->required();
  predict->add_option("wav", f.wav, "Input WAV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    const cli::RunConfig config = Resolve(f);
    if (synth->parsed()) {
      cli::CmdSynth(config, config.out_dir.empty() ? config.corpus_dir : config.out_dir, std::cout);
    } else if (prepare->parsed()) {
      const auto out = config.out_dir.empty() ? config.manifest_path().parent_path() : config.out_dir;
      cli::CmdPrepare(config, out.empty() ? "." : out, std::cout);
    } else if (featurize->parsed()) {
      cli::CmdFeaturize(config, config.out_dir.empty() ? config.features_dir : config.out_dir, std::cout);
    } else if (train->parsed()) {
      cli::CmdTrain(config, OutDir(config, "run"), std::cout, f.quiet ? nullptr : &std::cerr);
    } else if (evaluate->parsed()) {
      std::vector<std::filesystem::path> dirs(f.features_dirs.begin(), f.features_dirs.end());
      if (dirs.empty()) dirs.push_back(config.features_dir);
      cli::CmdEvaluate(config, dirs, OutDir(config, "report"), std::cout);
    } else if (predict->parsed()) {
      cli::CmdPredict(f.predict_model, f.wav, f.out_dir, std::cout);
    }
  } catch (const sg::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(sg::ErrorKindName(e.kind())).c_str(), e.what());
    return cli::ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: io: %s\n", e.what());
    return cli::kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return cli::kExitInternal;
  }
  return cli::kExitOk;
}
