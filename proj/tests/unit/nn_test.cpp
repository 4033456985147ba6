#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "../support/test_util.hpp"
#include "soundguard/error.hpp"
#include "soundguard/metrics.hpp"
#include "soundguard/nn/adam.hpp"
#include "soundguard/nn/model.hpp"
#include "soundguard/nn/train.hpp"

namespace soundguard::nn {
namespace {

using soundguard::testing::RandomFeatures;

struct Batch {
  std::vector<FeatureMatrix> storage;
  std::vector<FeatureView> views;
  std::vector<int> labels;
  std::vector<Example> examples;
};

Batch MakeBatch(std::size_t count, std::size_t frames, std::size_t dims, std::uint64_t seed,
                double separation = 0.0) {
  Batch b;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 2);
    b.storage.push_back(RandomFeatures(frames, dims, seed * 1000 + i, label * separation));
    b.labels.push_back(label);
  }
  for (std::size_t i = 0; i < count; ++i) {
    b.views.push_back(b.storage[i].view());
    b.examples.push_back({b.views[i], b.labels[i]});
  }
  return b;
}

Model ZeroedWithRandomBiases(Model m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (auto& t : m.parameters) {
    if (t.name.ends_with(".bias")) for (auto& v : t.data) v = dist(gen);
  }
  return m;
}

TEST(Init, SameSeedIsBitIdentical) {
  const auto spec = ModelSpec::Cnn(100, 26, 42);
  EXPECT_EQ(InitModel(spec).parameters, InitModel(spec).parameters);
  EXPECT_NE(InitModel(spec).parameters, InitModel(ModelSpec::Cnn(100, 26, 43)).parameters);
}

TEST(Init, BiasesAreZeroAndWeightsAreFloats) {
  for (const auto& spec : {ModelSpec::Ffnn(12, 1), ModelSpec::Cnn(50, 12, 1)}) {
    const Model m = InitModel(spec);
    for (const auto& t : m.parameters) {
      for (double v : t.data) {
        if (t.name.ends_with(".bias")) EXPECT_EQ(v, 0.0);
        EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
      }
    }
  }
}

TEST(Init, GlorotBoundForLogMelFfnn) {
  const Model m = InitModel(ModelSpec::Ffnn(26, 7));
  const Tensor& w = m.parameters[0];
  ASSERT_EQ(w.name, "dense1.weight");
  EXPECT_EQ(w.shape, (std::vector<std::size_t>{32, 52}));
  const double bound = std::sqrt(6.0 / (52.0 + 32.0));
  EXPECT_NEAR(bound, 0.2673, 1e-4);
  double max_abs = 0.0;
  for (double v : w.data) max_abs = std::max(max_abs, std::abs(v));
  EXPECT_LE(max_abs, bound);
  EXPECT_GT(max_abs, 0.95 * bound);
}

TEST(Init, ConvFansUseKernelTimesChannels) {
  const Model m = InitModel(ModelSpec::Cnn(50, 4, 3));
  const Tensor* w = FindTensor(m.parameters, "conv2.weight");
  ASSERT_NE(w, nullptr);
  const double bound = std::sqrt(6.0 / (2.0 * 32 + 2.0 * 32));
  for (double v : w->data) EXPECT_LE(std::abs(v), bound);
}

TEST(Forward, ZeroParametersGiveOneHalf) {
  for (const auto& spec : {ModelSpec::Ffnn(4, 0), ModelSpec::Cnn(16, 4, 0)}) {
    Model m = InitModel(spec);
    for (auto& t : m.parameters) std::fill(t.data.begin(), t.data.end(), 0.0);
    const auto x = RandomFeatures(16, 4, 5, 3.0);
    EXPECT_EQ(Forward(m, x.view()), 0.5);
  }
}

TEST(Forward, OutputIsStrictlyInsideUnitInterval) {
  for (const auto& spec : {ModelSpec::Ffnn(4, 2), ModelSpec::Cnn(16, 4, 2)}) {
    const Model m = InitModel(spec);
    for (double scale : {1.0, 100.0, -100.0}) {
      auto x = RandomFeatures(16, 4, 9);
      for (auto& v : x.values) v *= scale;
      const double p = Forward(m, x.view());
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(Forward, HandSizedNetwork) {
  // Pooled input of a 1-column feature over frames {1, 3}: mean 2, std 1.
  ModelSpec spec = ModelSpec::Ffnn(1, 0);
  spec.dense_units = {2};
  Model m = InitModel(spec);
  m.parameters[0].data = {0.5, -1.0, -0.25, 2.0};  // dense1.weight [2 x 2]
  m.parameters[1].data = {0.1, -0.2};              // dense1.bias
  m.parameters[2].data = {1.5, -0.75};             // output.weight
  m.parameters[3].data = {0.05};                   // output.bias
  FeatureMatrix x(2, 1, FeatureKind::kLogMel);
  x.at(0, 0) = 1.0;
  x.at(1, 0) = 3.0;
  // h1 = relu(0.5*2 - 1*1 + 0.1) = 0.1; h2 = relu(-0.25*2 + 2*1 - 0.2) = 1.3
  // z = 1.5*0.1 - 0.75*1.3 + 0.05 = -0.775
  const double expected = 1.0 / (1.0 + std::exp(0.775));
  EXPECT_NEAR(Forward(m, x.view()), expected, 1e-6);
  EXPECT_EQ(PoolMeanStd(x.view()), (std::vector<double>{2.0, 1.0}));
}

TEST(Forward, RejectsWrongShapes) {
  const Model cnn = InitModel(ModelSpec::Cnn(16, 4, 0));
  EXPECT_THROW(Forward(cnn, RandomFeatures(16, 5, 1).view()), Error);
  EXPECT_THROW(Forward(cnn, RandomFeatures(cnn.spec.MinFrames() - 1, 4, 1).view()), Error);
  EXPECT_NO_THROW(Forward(cnn, RandomFeatures(cnn.spec.MinFrames(), 4, 1).view()));
  const Model ffnn = InitModel(ModelSpec::Ffnn(4, 0));
  EXPECT_THROW(Forward(ffnn, RandomFeatures(10, 3, 1).view()), Error);
}

TEST(Forward, PositivePathIsMonotone) {
  ModelSpec spec = ModelSpec::Ffnn(2, 0);
  spec.dense_units = {1};
  Model m = InitModel(spec);
  m.parameters[0].data = {0.3, 0.2, 0.1, 0.4};
  m.parameters[1].data = {0.0};
  m.parameters[2].data = {0.8};
  auto x = RandomFeatures(12, 2, 3, 1.0);
  double prev = Forward(m, x.view());
  for (double c : {1.5, 2.0, 5.0}) {
    auto scaled = x;
    for (auto& v : scaled.values) v *= c;
    const double p = Forward(m, scaled.view());
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(Shapes, StageLengths) {
  const ModelSpec spec = ModelSpec::Cnn(16, 4, 0);
  EXPECT_EQ(CnnStageLengths(spec, 16), (std::vector<std::size_t>{15, 7, 6, 3}));
  EXPECT_EQ(CnnStageLengths(spec, 1998), (std::vector<std::size_t>{1997, 998, 997, 498}));
  EXPECT_EQ(CnnStageLengths(spec, 5996), (std::vector<std::size_t>{5995, 2997, 2996, 1498}));
  for (std::size_t t : {16u, 1998u, 5996u}) {
    std::size_t len = t;
    const auto stages = CnnStageLengths(spec, t);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      len = i % 2 == 0 ? (len - 2) / 1 + 1 : len / 2;
      EXPECT_EQ(stages[i], len);
    }
  }
  EXPECT_EQ(spec.MinFrames(), 7u);
}

TEST(Loss, ClosedForms) {
  const ClassWeights ones{1.0, 1.0};
  const std::vector<int> labels = {0, 1, 1, 0};
  const std::vector<double> exact = {0.0, 1.0, 1.0, 0.0};
  EXPECT_LE(WeightedBce(exact, labels, ones), 1e-6);
  const std::vector<double> half(4, 0.5);
  EXPECT_NEAR(WeightedBce(half, labels, ones), std::log(2.0), 1e-12);
  const std::vector<double> p = {0.25};
  const std::vector<int> y = {1};
  EXPECT_NEAR(WeightedBce(p, y, {1.0, 2.0}), 2.0 * -std::log(0.25), 1e-12);
  EXPECT_NEAR(2.0 * -std::log(0.25), 2.7726, 1e-4);
}

TEST(Loss, PerfectBeatsInverted) {
  const std::vector<int> labels = {0, 1, 1, 0, 1};
  std::vector<double> good, bad;
  for (int y : labels) {
    good.push_back(y ? 0.9 : 0.1);
    bad.push_back(y ? 0.1 : 0.9);
  }
  EXPECT_LT(WeightedBce(good, labels, {1.3, 0.7}), WeightedBce(bad, labels, {1.3, 0.7}));
}

TEST(Loss, BalancedWeights) {
  const ClassWeights w = BalancedClassWeights(300, 100);
  EXPECT_DOUBLE_EQ(w.negative, 400.0 / 600.0);
  EXPECT_DOUBLE_EQ(w.positive, 400.0 / 200.0);
  EXPECT_THROW(BalancedClassWeights(0, 5), Error);
}

TEST(Gradients, FfnnMatchesFiniteDifferences) {
  const Model m = ZeroedWithRandomBiases(InitModel(ModelSpec::Ffnn(4, 11)), 1);
  const Batch b = MakeBatch(6, 10, 4, 1);
  const auto check = oracle::CheckGradients(m, b.views, b.labels, {0.8, 1.4});
  EXPECT_LT(check.max_relative_error, 1e-4) << check.worst_parameter << "[" << check.worst_index << "]";
  EXPECT_EQ(check.checked, 8u * 32 + 32 + 32 * 16 + 16 + 16 + 1);
}

TEST(Gradients, CnnMatchesFiniteDifferences) {
  const Model m = ZeroedWithRandomBiases(InitModel(ModelSpec::Cnn(16, 4, 12)), 2);
  const Batch b = MakeBatch(4, 16, 4, 2);
  const auto check = oracle::CheckGradients(m, b.views, b.labels, {1.0, 1.0});
  EXPECT_LT(check.max_relative_error, 1e-4) << check.worst_parameter << "[" << check.worst_index << "]";
}

TEST(Gradients, NearStationaryWhenFit) {
  Model m = InitModel(ModelSpec::Ffnn(4, 3));
  m.parameters.back().data[0] = 12.0;  // output bias: p ~ 1 - 6e-6
  Batch b = MakeBatch(4, 10, 4, 3);
  std::fill(b.labels.begin(), b.labels.end(), 1);
  const auto lg = Backward(m, b.views, b.labels, {1.0, 1.0});
  EXPECT_LT(std::sqrt(SquaredNorm(lg.gradients)), 1e-4);
}

TEST(Gradients, ZeroInputGivesZeroConvWeightGradients) {
  for (bool random_bias : {false, true}) {
    Model m = InitModel(ModelSpec::Cnn(16, 4, 4));
    if (random_bias) m = ZeroedWithRandomBiases(m, 5);
    FeatureMatrix zero(16, 4, FeatureKind::kLogMel);
    const std::vector<FeatureView> batch = {zero.view(), zero.view()};
    const std::vector<int> labels = {0, 1};
    const auto lg = Backward(m, batch, labels, {1.0, 1.0});
    for (double g : FindTensor(lg.gradients, "conv1.weight")->data) EXPECT_EQ(g, 0.0);
    if (!random_bias) {
      // every conv activation is relu(0) = 0, so no weight sees a signal
      for (double g : FindTensor(lg.gradients, "conv2.weight")->data) EXPECT_EQ(g, 0.0);
    }
  }
}

TEST(Gradients, DoublingPositiveWeightDoublesEverything) {
  const Model m = ZeroedWithRandomBiases(InitModel(ModelSpec::Cnn(16, 4, 6)), 6);
  Batch b = MakeBatch(5, 16, 4, 6);
  std::fill(b.labels.begin(), b.labels.end(), 1);
  const auto one = Backward(m, b.views, b.labels, {0.3, 1.7});
  const auto two = Backward(m, b.views, b.labels, {0.3, 3.4});
  EXPECT_EQ(two.loss, 2.0 * one.loss);
  for (std::size_t p = 0; p < one.gradients.size(); ++p) {
    for (std::size_t i = 0; i < one.gradients[p].size(); ++i) {
      ASSERT_EQ(two.gradients[p].data[i], 2.0 * one.gradients[p].data[i]);
    }
  }
}

TEST(Gradients, LossMatchesForward) {
  const Model m = InitModel(ModelSpec::Cnn(16, 4, 8));
  const Batch b = MakeBatch(3, 20, 4, 8);
  const auto lg = Backward(m, b.views, b.labels, {1.0, 2.0});
  const auto probs = Forward(m, b.views);
  EXPECT_EQ(lg.probabilities, probs);
  EXPECT_DOUBLE_EQ(lg.loss, WeightedBce(probs, b.labels, {1.0, 2.0}));
}

TEST(Adam, ZeroGradientFromFreshStateLeavesParameters) {
  Model m = InitModel(ModelSpec::Ffnn(4, 1));
  const TensorList before = m.parameters;
  AdamState state = AdamState::For(m.parameters);
  AdamStep(m.parameters, ZerosLike(m.parameters), state, 1e-3);
  EXPECT_EQ(m.parameters, before);
  EXPECT_EQ(state.step, 1u);
  for (const auto& v : state.first_moment) for (double x : v) EXPECT_EQ(x, 0.0);
}

TEST(Adam, ZeroGradientDecaysMoments) {
  TensorList params = {Tensor("w", {3})};
  AdamState state = AdamState::For(params);
  TensorList g = {Tensor("w", {3})};
  g[0].data = {1.0, -2.0, 0.5};
  AdamStep(params, g, state, 1e-3);
  const auto m1 = state.first_moment[0];
  const auto v1 = state.second_moment[0];
  AdamStep(params, ZerosLike(g), state, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(state.first_moment[0][i], 0.9 * m1[i]);
    EXPECT_DOUBLE_EQ(state.second_moment[0][i], 0.999 * v1[i]);
  }
}

TEST(Adam, FirstStepMovesEachCoordinateByLearningRate) {
  TensorList params = {Tensor("w", {4})};
  TensorList g = {Tensor("w", {4})};
  g[0].data = {3.0, -0.01, 250.0, -1.0};
  AdamState state = AdamState::For(params);
  AdamStep(params, g, state, 1e-3);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(params[0].data[i], -1e-3 * (g[0].data[i] > 0 ? 1.0 : -1.0), 1e-8);
  }
}

TEST(Adam, NonFiniteGradientAbortsUntouched) {
  TensorList params = {Tensor("a", {2}), Tensor("b", {2})};
  params[0].data = {1.0, 2.0};
  TensorList g = ZerosLike(params);
  g[0].data = {0.5, 0.5};
  g[1].data = {0.1, std::nan("")};
  AdamState state = AdamState::For(params);
  const TensorList before = params;
  try {
    AdamStep(params, g, state, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTraining);
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
  }
  EXPECT_EQ(params, before);
  EXPECT_EQ(state.step, 0u);
}

// Eight distinguishable segments (each has its own per-coefficient offset)
// with labels unrelated to the offsets.
Batch DistinctSegments() {
  Batch b;
  std::mt19937_64 gen(77);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < 8; ++i) {
    FeatureMatrix m(40, 6, FeatureKind::kLogMel);
    std::vector<double> offset(6);
    for (auto& o : offset) o = dist(gen);
    for (std::size_t t = 0; t < 40; ++t)
      for (std::size_t f = 0; f < 6; ++f) m.at(t, f) = offset[f] + dist(gen);
    b.storage.push_back(std::move(m));
    b.labels.push_back(static_cast<int>(i % 2));
  }
  for (std::size_t i = 0; i < 8; ++i) {
    b.views.push_back(b.storage[i].view());
    b.examples.push_back({b.views[i], b.labels[i]});
  }
  return b;
}

double OverfitLoss(ModelKind kind, std::size_t steps) {
  const Batch b = DistinctSegments();
  const auto spec = kind == ModelKind::kCnn ? ModelSpec::Cnn(40, 6, 5) : ModelSpec::Ffnn(6, 5);
  Model m = InitModel(spec);
  Trainer trainer(m, {1.0, 1.0});
  for (std::size_t i = 0; i < steps; ++i) trainer.Step(b.examples, 1e-3);
  return WeightedBce(Forward(m, b.views), b.labels, {1.0, 1.0});
}

TEST(Train, EachModelOverfitsEightSegments) {
  EXPECT_LT(OverfitLoss(ModelKind::kCnn, 200), 0.05);
  EXPECT_LT(OverfitLoss(ModelKind::kFfnn, 200), 0.05);
}

TEST(Train, TrajectoriesAreReproducible) {
  const Batch b = MakeBatch(8, 16, 4, 5);
  Model a = InitModel(ModelSpec::Cnn(16, 4, 1));
  Model c = InitModel(ModelSpec::Cnn(16, 4, 1));
  Trainer ta(a, {1.0, 1.0}), tc(c, {1.0, 1.0});
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(ta.Step(b.examples, 1e-3), tc.Step(b.examples, 1e-3));
    ASSERT_EQ(a.parameters, c.parameters);
  }
}

struct Splits {
  Batch train, valid;
};

Splits SeparableSplits() {
  return {MakeBatch(64, 20, 4, 10, 0.6), MakeBatch(24, 20, 4, 11, 0.6)};
}

TEST(Train, LearningRateStaysInRangeAndNeverGrows) {
  // Validation labels carry no signal, so its loss soon stops improving.
  const Splits s{MakeBatch(64, 20, 4, 10, 0.6), MakeBatch(24, 20, 4, 11, 0.0)};
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.max_epochs = 30;
  cfg.plateau_patience = 1;
  cfg.early_stop_patience = 30;
  const auto result = Train(InitModel(ModelSpec::Ffnn(4, 3)), s.train.examples, s.valid.examples, cfg);
  ASSERT_EQ(result.history.size(), 30u);
  double prev = 1.0;
  bool decayed = false;
  for (const auto& r : result.history) {
    EXPECT_LE(r.learning_rate, prev);
    EXPECT_GE(r.learning_rate, 1e-4);
    EXPECT_LE(r.learning_rate, 1e-3);
    decayed |= r.learning_rate < 1e-3;
    prev = r.learning_rate;
  }
  EXPECT_TRUE(decayed);
}

TEST(Train, SameSeedSameHistoryAndModel) {
  const Splits s = SeparableSplits();
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.max_epochs = 5;
  cfg.seed = 9;
  const Model init = InitModel(ModelSpec::Cnn(20, 4, 2));
  const auto a = Train(init, s.train.examples, s.valid.examples, cfg);
  const auto b = Train(init, s.train.examples, s.valid.examples, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.model.parameters, b.model.parameters);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  cfg.seed = 10;
  const auto c = Train(init, s.train.examples, s.valid.examples, cfg);
  EXPECT_NE(a.history, c.history);
}

TEST(Train, EarlyStoppingReturnsBestEpoch) {
  const Splits s = SeparableSplits();
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.max_epochs = 200;
  cfg.early_stop_patience = 3;
  const auto result = Train(InitModel(ModelSpec::Ffnn(4, 4)), s.train.examples, s.valid.examples, cfg);
  ASSERT_LT(result.history.size(), 200u);
  const auto& best = result.history[result.best_epoch - 1];
  for (const auto& r : result.history) EXPECT_LE(r.valid_macro_f1, best.valid_macro_f1);
  for (std::size_t e = result.best_epoch; e < result.history.size(); ++e) {
    EXPECT_LE(result.history[e].valid_macro_f1, best.valid_macro_f1);
  }
  EXPECT_EQ(result.history.size(), result.best_epoch + 3);
  // The returned parameters reproduce the best epoch's validation F1.
  const auto verdicts = ThresholdVerdicts(Forward(result.model, s.valid.views));
  EXPECT_EQ(MacroF1(verdicts, s.valid.labels).macro_f1, best.valid_macro_f1);
  for (const auto& t : result.model.parameters)
    for (double v : t.data) EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
}

TEST(Train, EmptySplitIsInsufficientData) {
  const Splits s = SeparableSplits();
  try {
    Train(InitModel(ModelSpec::Ffnn(4, 0)), {}, s.valid.examples, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientData);
  }
  EXPECT_THROW(Train(InitModel(ModelSpec::Ffnn(4, 0)), s.train.examples, {}, {}), Error);
}

TEST(Train, ConfigValidation) {
  TrainConfig c;
  c.lr_min = 1e-2;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  c.plateau_patience = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = {};
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.Digest(), TrainConfig{}.Digest());
  c.seed = 1;
  EXPECT_NE(c.Digest(), TrainConfig{}.Digest());
}

}  // namespace
}  // namespace soundguard::nn
