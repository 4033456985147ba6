#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soundguard/features.hpp"
#include "soundguard/nn/adam.hpp"
#include "soundguard/nn/model.hpp"

namespace soundguard::nn {

struct TrainConfig {
  std::size_t batch_size = 128;
  double lr_init = 1e-3;
  double lr_min = 1e-4;
  double lr_decay_factor = 0.5;
  std::size_t plateau_patience = 3;
  std::size_t early_stop_patience = 10;
  std::size_t max_epochs = 100;
  /// Derived from training label counts (N / 2 N_c) when unset.
  std::optional<ClassWeights> class_weights;
  std::uint64_t seed = 0;

  /// Throws Error(kConfig) on out-of-range values.
  void Validate() const;
  /// Stable hex digest of every field, stored with trained models.
  std::string Digest() const;
};

/// One training or validation segment.
struct Example {
  FeatureView features;
  int label = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double valid_macro_f1 = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  Model model;  // parameters from the best-validation-F1 epoch, float32-rounded
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  ClassWeights class_weights;
};

/// Mini-batch optimizer over a model's parameters.
class Trainer {
 public:
  Trainer(Model& model, ClassWeights weights);

  /// One Adam step on `batch`; returns the batch loss before the update.
  double Step(std::span<const Example> batch, double lr);

  const AdamState& optimizer() const { return adam_; }

 private:
  Model& model_;
  ClassWeights weights_;
  AdamState adam_;
  std::vector<FeatureView> views_;
  std::vector<int> labels_;
};

/// Trains with weighted BCE and Adam on batches drawn in a seeded shuffle.
/// The learning rate is halved (floored at lr_min) after `plateau_patience`
/// epochs without a lower validation loss; training stops after
/// `early_stop_patience` epochs without a higher validation macro-F1, or at
/// max_epochs. Throws Error(kInsufficientData) on an empty split.
TrainResult Train(const Model& initial, std::span<const Example> train,
                  std::span<const Example> valid, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Segment verdicts: 1 iff probability > 0.5.
std::vector<int> ThresholdVerdicts(std::span<const double> probabilities, double threshold = 0.5);

}  // namespace soundguard::nn
