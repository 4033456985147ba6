#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "../support/test_util.hpp"
#include "soundguard/dsp.hpp"
#include "soundguard/error.hpp"

namespace soundguard {
namespace {

const FeatureConfig kConfig;

TEST(Framing, FrameCounts) {
  EXPECT_EQ(FrameAndWindow(std::vector<float>(400, 0.0f), kConfig).rows, 1u);
  EXPECT_EQ(FrameAndWindow(std::vector<float>(720, 0.0f), kConfig).rows, 3u);
  EXPECT_EQ(FrameCount(16000 * 20, 400, 160), 1998u);
  EXPECT_EQ(FrameCount(399, 400, 160), 0u);
}

TEST(Framing, TooShortIsRejected) {
  EXPECT_THROW(FrameAndWindow(std::vector<float>(399, 0.0f), kConfig), Error);
}

TEST(Framing, OnesFrameIsTheWindow) {
  const Matrix frames = FrameAndWindow(std::vector<float>(400, 1.0f), kConfig);
  const auto hann = oracle::PeriodicHann(400);
  for (std::size_t i = 0; i < 400; ++i) EXPECT_NEAR(frames(0, i), hann[i], 1e-15);
  EXPECT_EQ(frames(0, 0), 0.0);
}

TEST(Spectrum, ZeroFrameIsZero) {
  const Matrix p = PowerSpectrum(Matrix(2, 400), 512);
  ASSERT_EQ(p.cols, 257u);
  for (double v : p.data) EXPECT_EQ(v, 0.0);
}

TEST(Spectrum, ImpulseIsFlat) {
  Matrix frame(1, 400);
  frame(0, 0) = 1.0;
  const Matrix p = PowerSpectrum(frame, 512);
  for (double v : p.data) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Spectrum, OneKilohertzPeaksAtBin32) {
  const auto tone = testing::Sine(1000.0, 400.0 / 16000.0, 16000);
  const Matrix p = PowerSpectrum(FrameAndWindow(tone, kConfig), 512);
  const auto row = p.row(0);
  EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 32);
}

TEST(Spectrum, MatchesDirectDft) {
  const auto noise = testing::Noise(400, 11);
  const Matrix frames = FrameAndWindow(noise, kConfig);
  const Matrix p = PowerSpectrum(frames, 512);
  const auto direct = oracle::DirectPowerSpectrum(frames.row(0), 512);
  for (std::size_t k = 0; k < direct.size(); ++k) EXPECT_NEAR(p(0, k), direct[k], 1e-9);
}

TEST(Mel, ScaleValues) {
  EXPECT_EQ(HzToMel(0.0), 0.0);
  EXPECT_NEAR(HzToMel(700.0), 781.17, 0.01);
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  for (double hz : {10.0, 440.0, 7999.0}) EXPECT_NEAR(MelToHz(HzToMel(hz)), hz, 1e-9);
}

TEST(Mel, FiltersAreContiguousTriangles) {
  const Matrix bank = MelFilterbank(kConfig);
  ASSERT_EQ(bank.rows, 26u);
  ASSERT_EQ(bank.cols, 257u);
  const auto oracle_bank = oracle::MelWeights(kConfig);
  std::vector<double> centres;
  for (std::size_t m = 0; m < bank.rows; ++m) {
    const auto row = bank.row(m);
    std::size_t first = row.size(), last = 0, runs = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      EXPECT_GE(row[k], 0.0);
      EXPECT_LE(row[k], 1.0);
      EXPECT_NEAR(row[k], oracle_bank[m][k], 1e-12);
      if (row[k] > 0.0) {
        if (k == 0 || row[k - 1] == 0.0) ++runs;
        first = std::min(first, k);
        last = k;
      }
    }
    EXPECT_EQ(runs, 1u) << "filter " << m;
    centres.push_back(static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin()));
    if (m > 0) {
      // neighbours overlap: this filter starts before the previous one ends
      const auto prev = bank.row(m - 1);
      std::size_t prev_last = 0;
      for (std::size_t k = 0; k < prev.size(); ++k) if (prev[k] > 0.0) prev_last = k;
      EXPECT_LE(first, prev_last + 1);
    }
    (void)last;
  }
  for (std::size_t m = 1; m < centres.size(); ++m) EXPECT_GE(centres[m], centres[m - 1]);
  const double mel_step = HzToMel(8000.0) / 27.0;
  for (std::size_t m = 1; m < 26; ++m) {
    EXPECT_GT(MelToHz(mel_step * (m + 1)), MelToHz(mel_step * m));
  }
}

TEST(LogMel, SilenceSitsOnTheFloor) {
  const FeatureMatrix f = LogMel(std::vector<float>(1600, 0.0f));
  EXPECT_EQ(f.kind, FeatureKind::kLogMel);
  EXPECT_EQ(f.dims, 26u);
  for (double v : f.values) EXPECT_NEAR(v, -23.02585093, 1e-6);
}

TEST(LogMel, NoiseVariesInEveryBand) {
  const FeatureMatrix f = LogMel(testing::Noise(16000, 21));
  for (std::size_t b = 0; b < f.dims; ++b) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < f.frames; ++t) mean += f.at(t, b);
    mean /= f.frames;
    for (std::size_t t = 0; t < f.frames; ++t) sq += (f.at(t, b) - mean) * (f.at(t, b) - mean);
    EXPECT_GT(sq / f.frames, 0.0) << "band " << b;
  }
}

TEST(LogMel, GainTenShiftsByLogHundred) {
  auto x = testing::Noise(4000, 2, 0.05);
  std::vector<float> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 10.0f * x[i];
  const FeatureMatrix a = LogMel(x);
  const FeatureMatrix b = LogMel(y);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] > std::log(1e-10) + 1.0) EXPECT_NEAR(b.values[i] - a.values[i], std::log(100.0), 1e-4);
  }
}

TEST(Mfcc, ConstantLogMelHasNoCepstrum) {
  FeatureExtractor fx(kConfig);
  FeatureMatrix lm(1, 26, FeatureKind::kLogMel);
  std::fill(lm.values.begin(), lm.values.end(), -3.7);
  const FeatureMatrix c = fx.MfccFromLogMel(lm);
  ASSERT_EQ(c.dims, 12u);
  for (double v : c.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Mfcc, UnitVectorClosedForm) {
  FeatureExtractor fx(kConfig);
  FeatureMatrix lm(1, 26, FeatureKind::kLogMel);
  lm.at(0, 0) = 1.0;
  const FeatureMatrix c = fx.MfccFromLogMel(lm);
  for (std::size_t k = 1; k <= 12; ++k) {
    EXPECT_NEAR(c.at(0, k - 1), std::sqrt(2.0 / 26.0) * std::cos(std::numbers::pi * k * 0.5 / 26.0), 1e-12);
  }
}

TEST(Mfcc, FullDctInvertsToLogMel) {
  const Matrix dct = DctMatrix(26, 26);
  const auto frame = LogMel(testing::Noise(400, 4));
  std::vector<double> coeffs(26, 0.0), back(26, 0.0);
  for (std::size_t k = 0; k < 26; ++k)
    for (std::size_t n = 0; n < 26; ++n) coeffs[k] += dct(k, n) * frame.at(0, n);
  for (std::size_t n = 0; n < 26; ++n)
    for (std::size_t k = 0; k < 26; ++k) back[n] += dct(k, n) * coeffs[k];
  for (std::size_t n = 0; n < 26; ++n) EXPECT_NEAR(back[n], frame.at(0, n), 1e-6);
}

TEST(Features, MatchBruteForceOnRandomFrames) {
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    const auto frame = testing::Noise(400, seed, 0.8);
    const auto lm = LogMel(frame);
    const auto mf = Mfcc(frame);
    const auto lm_ref = oracle::LogMelFrame(frame, kConfig);
    const auto mf_ref = oracle::MfccFrame(frame, kConfig);
    ASSERT_EQ(lm.frames, 1u);
    for (std::size_t b = 0; b < 26; ++b) EXPECT_NEAR(lm.at(0, b), lm_ref[b], 1e-4);
    for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(mf.at(0, k), mf_ref[k], 1e-4);
  }
}

TEST(Features, ClipSlicesEqualPerSegmentAnalysis) {
  auto clip = testing::MakeClip("c", testing::Noise(16000 * 5 + 123, 8), 16000, ClassLabel::kPorn);
  const FeatureExtractor fx(kConfig);
  const SegmentParams params{2.0, 1.0};
  for (auto kind : {FeatureKind::kLogMel, FeatureKind::kMfcc}) {
    const ClipFeatures cf = FeaturizeClip(clip, params, fx, kind);
    const auto segs = SegmentClip(clip, params);
    ASSERT_EQ(cf.segments.size(), segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const FeatureMatrix direct = fx.Compute(segs[i].samples, kind);
      const FeatureView view = cf.segment(i);
      ASSERT_EQ(view.frames, direct.frames);
      for (std::size_t j = 0; j < direct.values.size(); ++j) ASSERT_EQ(view.values[j], direct.values[j]);
    }
  }
}

TEST(Features, OddHopFallsBackToPerSegment) {
  auto clip = testing::MakeClip("c", testing::Noise(16000 * 3, 9));
  const FeatureExtractor fx(kConfig);
  const SegmentParams params{1.0, 0.333};
  const ClipFeatures cf = FeaturizeClip(clip, params, fx, FeatureKind::kLogMel);
  const auto segs = SegmentClip(clip, params);
  ASSERT_EQ(cf.segments.size(), segs.size());
  const FeatureMatrix direct = fx.LogMel(segs.back().samples);
  EXPECT_EQ(std::vector<double>(cf.segment(segs.size() - 1).values.begin(),
                                cf.segment(segs.size() - 1).values.end()),
            direct.values);
}

TEST(Features, ConfigValidation) {
  FeatureConfig c;
  c.fft_size = 256;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.fmax = 9000;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.n_mfcc = 26;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_NO_THROW(FeatureConfig{}.Validate());
}

}  // namespace
}  // namespace soundguard
