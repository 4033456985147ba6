#include <set>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "soundguard/error.hpp"

namespace soundguard::cli {
namespace {

ErrorKind KindOf(std::string_view text) {
  try {
    ParseRunConfig(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::kIo;
}

TEST(RunConfig, EmptyObjectGivesDefaults) {
  const RunConfig c = ParseRunConfig("{}");
  EXPECT_EQ(c.feature_kind, FeatureKind::kLogMel);
  EXPECT_EQ(c.model_kind, nn::ModelKind::kCnn);
  EXPECT_EQ(c.segment.length_seconds, 20.0);
  EXPECT_EQ(c.methods.size(), 4u);
  EXPECT_EQ(c.manifest_path(), std::filesystem::path("corpus/manifest.csv"));
  EXPECT_NO_THROW(c.Validate());
}

TEST(RunConfig, FormatParseRoundTrip) {
  RunConfig c;
  c.seed = 1234;
  c.feature_kind = FeatureKind::kMfcc;
  c.segment = {60.0, 2.0};
  c.feature_config.n_mels = 40;
  c.model_kind = nn::ModelKind::kFfnn;
  c.train.max_epochs = 7;
  c.train.class_weights = nn::ClassWeights{0.75, 1.5};
  c.methods = {AggregationMethod::kVoting};
  c.models = {"a/model.sgm", "b/model.sgm"};
  c.split_ratios = {0.5, 0.25, 0.25};
  const std::string text = FormatRunConfig(c);
  const RunConfig back = ParseRunConfig(text);
  EXPECT_EQ(FormatRunConfig(back), text);
  EXPECT_EQ(back.seed, 1234u);
  EXPECT_EQ(back.feature_kind, FeatureKind::kMfcc);
  EXPECT_EQ(back.segment, (SegmentParams{60.0, 2.0}));
  EXPECT_EQ(back.feature_config, c.feature_config);
  EXPECT_EQ(back.model_kind, nn::ModelKind::kFfnn);
  ASSERT_TRUE(back.train.class_weights.has_value());
  EXPECT_EQ(back.train.class_weights->positive, 1.5);
  EXPECT_EQ(back.train.Digest(), [&] {
    nn::TrainConfig t = c.train;
    t.seed = back.train.seed;
    return t.Digest();
  }());
  EXPECT_EQ(back.methods, c.methods);
  EXPECT_EQ(back.models, c.models);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(KindOf(R"({"sed": 1})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(R"({"train": {"epochs": 3}})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(R"({"model": "rnn"})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(R"({"features": {"kind": "spectrogram"}})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(R"({"aggregation": ["mean"]})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(R"({"seed": "x"})"), ErrorKind::kConfig);
  EXPECT_EQ(KindOf("{"), ErrorKind::kConfig);

  RunConfig c = ParseRunConfig(R"({"split": {"ratios": [0.6, 0.3, 0.3]}})");
  EXPECT_THROW(c.Validate(), Error);
}

TEST(RunConfig, SeedsAreDistinctAndStable) {
  RunConfig c;
  c.seed = 5;
  const std::set<std::uint64_t> seeds = {c.synth_seed(), c.split_seed(), c.model_seed(), c.shuffle_seed()};
  EXPECT_EQ(seeds.size(), 4u);
  RunConfig d;
  d.seed = 5;
  EXPECT_EQ(c.model_seed(), d.model_seed());
  d.seed = 6;
  EXPECT_NE(c.model_seed(), d.model_seed());
}

TEST(ExitCodes, MapErrorKinds) {
  EXPECT_EQ(ExitCodeFor(ErrorKind::kConfig), kExitUsage);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kFormat), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kInsufficientData), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kIo), kExitData);
  EXPECT_EQ(ExitCodeFor(ErrorKind::kTraining), kExitInternal);
}

}  // namespace
}  // namespace soundguard::cli
