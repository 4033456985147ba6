#include <gtest/gtest.h>

#include <cmath>

#include "../support/test_util.hpp"
#include "soundguard/dsp.hpp"
#include "soundguard/error.hpp"
#include "soundguard/file_util.hpp"
#include "soundguard/synth.hpp"

namespace soundguard {
namespace {

SynthConfig Small(std::uint64_t seed) {
  SynthConfig c;
  c.clips_per_class = 3;
  c.min_duration = 2.0;
  c.max_duration = 4.0;
  c.segment_length = 2.0;
  c.seed = seed;
  return c;
}

TEST(Synth, CorpusIsByteIdenticalForASeed) {
  testing::TempDir a("synth"), b("synth");
  const auto ma = GenerateCorpus(Small(5), a.path());
  const auto mb = GenerateCorpus(Small(5), b.path());
  EXPECT_EQ(ma.entries, mb.entries);
  EXPECT_EQ(ReadFile(a / "manifest.csv"), ReadFile(b / "manifest.csv"));
  for (const auto& e : ma.entries) {
    EXPECT_EQ(ReadFile(a.path() / e.clip_path), ReadFile(b.path() / e.clip_path)) << e.clip_path;
  }
  EXPECT_EQ(ma.entries.size(), 6u);
}

TEST(Synth, ClipsAreOrderIndependentAndSeeded) {
  const auto c = Small(9);
  EXPECT_EQ(GenerateClip(c, ClassLabel::kPorn, 2).samples, GenerateClip(c, ClassLabel::kPorn, 2).samples);
  EXPECT_NE(GenerateClip(c, ClassLabel::kPorn, 2).samples, GenerateClip(c, ClassLabel::kPorn, 1).samples);
  EXPECT_NE(GenerateClip(c, ClassLabel::kPorn, 2).samples, GenerateClip(Small(10), ClassLabel::kPorn, 2).samples);
  EXPECT_EQ(GenerateClip(c, ClassLabel::kNonPorn, 0).id, "class0_0000");
}

TEST(Synth, DurationsAndAmplitudesInRange) {
  SynthConfig c = Small(3);
  c.clips_per_class = 6;
  for (auto label : {ClassLabel::kNonPorn, ClassLabel::kPorn}) {
    for (std::size_t i = 0; i < c.clips_per_class; ++i) {
      const AudioClip clip = GenerateClip(c, label, i);
      EXPECT_EQ(clip.label, label);
      EXPECT_EQ(clip.sample_rate, 16000);
      EXPECT_GE(clip.duration_seconds(), c.min_duration);
      EXPECT_LE(clip.duration_seconds(), c.max_duration);
      for (float s : clip.samples) ASSERT_TRUE(std::isfinite(s) && std::abs(s) <= 1.0f);
    }
  }
}

TEST(Synth, ConfigValidation) {
  SynthConfig c = Small(0);
  c.min_duration = 1.0;  // below the segment length
  EXPECT_THROW(c.Validate(), Error);
  c = Small(0);
  c.max_duration = 1.5;
  EXPECT_THROW(c.Validate(), Error);
  c = Small(0);
  c.clips_per_class = 0;
  EXPECT_THROW(c.Validate(), Error);
}

// Mean log-mel profile of each class over a 20-clip corpus; at least five
// bands must differ by more than 3 dB.
TEST(Synth, ClassesAreSpectrallySeparated) {
  SynthConfig c;
  c.clips_per_class = 10;
  c.seed = 11;
  c.min_duration = 60.0;
  c.max_duration = 90.0;
  const FeatureExtractor fx{FeatureConfig{}};
  std::array<std::vector<double>, 2> profile;
  for (int label = 0; label < 2; ++label) {
    std::vector<double> sum(26, 0.0);
    std::size_t frames = 0;
    for (std::size_t i = 0; i < c.clips_per_class; ++i) {
      const AudioClip clip = GenerateClip(c, static_cast<ClassLabel>(label), i);
      const FeatureMatrix lm = fx.LogMel(clip.samples);
      for (std::size_t t = 0; t < lm.frames; ++t)
        for (std::size_t b = 0; b < 26; ++b) sum[b] += lm.at(t, b);
      frames += lm.frames;
    }
    for (auto& v : sum) v /= static_cast<double>(frames);
    profile[label] = sum;
  }
  int separated = 0;
  for (std::size_t b = 0; b < 26; ++b) {
    const double db = 10.0 / std::log(10.0) * std::abs(profile[1][b] - profile[0][b]);
    separated += db > 3.0;
  }
  EXPECT_GE(separated, 5);
}

}  // namespace
}  // namespace soundguard
