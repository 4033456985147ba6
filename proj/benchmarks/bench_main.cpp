#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "soundguard/aggregate.hpp"
#include "soundguard/audio_io.hpp"
#include "soundguard/dsp.hpp"
#include "soundguard/nn/model.hpp"

namespace sg = soundguard;

namespace {

std::vector<float> Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  std::vector<float> out(n);
  for (auto& x : out) x = u(gen);
  return out;
}

sg::FeatureMatrix RandomFeatures(std::size_t frames, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  sg::FeatureMatrix m(frames, dims, sg::FeatureKind::kLogMel);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t f = 0; f < dims; ++f) m.at(t, f) = d(gen);
  return m;
}

void BM_Fft512(benchmark::State& state) {
  const sg::FftPlan plan(512);
  std::vector<std::complex<double>> buf(512);
  const auto noise = Noise(512, 1);
  for (auto _ : state) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = noise[i];
    plan.Transform(buf);
    benchmark::DoNotOptimize(buf.data());
  }
}
BENCHMARK(BM_Fft512);

// One 20 s segment at 16 kHz.
void BM_LogMelSegment(benchmark::State& state) {
  const sg::FeatureExtractor fx{sg::FeatureConfig{}};
  const auto samples = Noise(320000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fx.LogMel(samples));
  state.SetItemsProcessed(state.iterations() * 1998);
}
BENCHMARK(BM_LogMelSegment)->Unit(benchmark::kMillisecond);

void BM_MfccSegment(benchmark::State& state) {
  const sg::FeatureExtractor fx{sg::FeatureConfig{}};
  const auto samples = Noise(320000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(fx.Mfcc(samples));
}
BENCHMARK(BM_MfccSegment)->Unit(benchmark::kMillisecond);

// 10 s at 44.1 kHz down to 16 kHz.
void BM_Resample44k(benchmark::State& state) {
  const auto samples = Noise(441000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sg::ResampleSamples(samples, 44100, 16000));
}
BENCHMARK(BM_Resample44k)->Unit(benchmark::kMillisecond);

struct NetFixture {
  sg::nn::Model model;
  std::vector<sg::FeatureMatrix> storage;
  std::vector<sg::FeatureView> views;
  std::vector<int> labels;

  NetFixture(sg::nn::ModelKind kind, std::size_t batch, std::size_t frames) {
    const std::size_t dims = 26;
    model = sg::nn::InitModel(kind == sg::nn::ModelKind::kCnn ? sg::nn::ModelSpec::Cnn(frames, dims, 7)
                                                              : sg::nn::ModelSpec::Ffnn(dims, 7));
    for (std::size_t i = 0; i < batch; ++i) {
      storage.push_back(RandomFeatures(frames, dims, 100 + i));
      labels.push_back(static_cast<int>(i % 2));
    }
    for (const auto& m : storage) views.push_back(m.view());
  }
};

// Batch of 16 segments of 1998 frames (20 s).
void BM_CnnForward(benchmark::State& state) {
  NetFixture f(sg::nn::ModelKind::kCnn, 16, 1998);
  for (auto _ : state) benchmark::DoNotOptimize(sg::nn::Forward(f.model, f.views));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_CnnForward)->Unit(benchmark::kMillisecond);

void BM_CnnBackward(benchmark::State& state) {
  NetFixture f(sg::nn::ModelKind::kCnn, 16, 1998);
  for (auto _ : state) benchmark::DoNotOptimize(sg::nn::Backward(f.model, f.views, f.labels, {}));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_CnnBackward)->Unit(benchmark::kMillisecond);

void BM_FfnnBackward(benchmark::State& state) {
  NetFixture f(sg::nn::ModelKind::kFfnn, 16, 1998);
  for (auto _ : state) benchmark::DoNotOptimize(sg::nn::Backward(f.model, f.views, f.labels, {}));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_FfnnBackward)->Unit(benchmark::kMillisecond);

void BM_SelectThreshold(benchmark::State& state) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u;
  std::vector<sg::ClipPrediction> clips(160);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    clips[i].clip_id = "c" + std::to_string(i);
    clips[i].label = static_cast<int>(i % 2);
    clips[i].segment_probs.resize(60);
    for (auto& p : clips[i].segment_probs) p = u(gen);
  }
  for (auto _ : state) benchmark::DoNotOptimize(sg::SelectThreshold(clips));
}
BENCHMARK(BM_SelectThreshold);

}  // namespace

BENCHMARK_MAIN();
