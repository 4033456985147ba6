#include "soundguard/nn/train.hpp"

#include <cstdio>
#include <limits>
#include <numeric>

#include "soundguard/error.hpp"
#include "soundguard/metrics.hpp"
#include "soundguard/rng.hpp"

namespace soundguard::nn {

void TrainConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorKind::kConfig, std::string("invalid train config: ") + what);
  };
  require(batch_size > 0, "batch_size must be positive");
  require(lr_min > 0.0 && lr_min <= lr_init, "need 0 < lr_min <= lr_init");
  require(lr_decay_factor > 0.0 && lr_decay_factor < 1.0, "lr_decay_factor must be in (0, 1)");
  require(plateau_patience >= 1 && early_stop_patience >= 1, "patience values must be >= 1");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  if (class_weights) {
    require(class_weights->negative > 0.0 && class_weights->positive > 0.0,
            "class weights must be positive");
  }
}

std::string TrainConfig::Digest() const {
  char text[512];
  std::snprintf(text, sizeof(text), "%zu|%.17g|%.17g|%.17g|%zu|%zu|%zu|%d|%.17g|%.17g|%llu",
                batch_size, lr_init, lr_min, lr_decay_factor, plateau_patience,
                early_stop_patience, max_epochs, class_weights.has_value() ? 1 : 0,
                class_weights ? class_weights->negative : 0.0,
                class_weights ? class_weights->positive : 0.0,
                static_cast<unsigned long long>(seed));
  // FNV-1a 64.
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char* c = text; *c != '\0'; ++c) {
    hash ^= static_cast<unsigned char>(*c);
    hash *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

std::vector<int> ThresholdVerdicts(std::span<const double> probabilities, double threshold) {
  std::vector<int> out(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) out[i] = probabilities[i] > threshold ? 1 : 0;
  return out;
}

Trainer::Trainer(Model& model, ClassWeights weights)
    : model_(model), weights_(weights), adam_(AdamState::For(model.parameters)) {}

double Trainer::Step(std::span<const Example> batch, double lr) {
  views_.clear();
  labels_.clear();
  for (const auto& ex : batch) {
    views_.push_back(ex.features);
    labels_.push_back(ex.label);
  }
  auto result = Backward(model_, views_, labels_, weights_);
  AdamStep(model_.parameters, result.gradients, adam_, lr);
  return result.loss;
}

TrainResult Train(const Model& initial, std::span<const Example> train,
                  std::span<const Example> valid, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.Validate();
  if (train.empty()) Fail(ErrorKind::kInsufficientData, "training split is empty");
  if (valid.empty()) Fail(ErrorKind::kInsufficientData, "validation split is empty");

  std::size_t positives = 0;
  for (const auto& ex : train) positives += ex.label == 1 ? 1 : 0;
  const ClassWeights weights =
      config.class_weights ? *config.class_weights
                           : BalancedClassWeights(train.size() - positives, positives);

  std::vector<FeatureView> valid_views;
  std::vector<int> valid_labels;
  for (const auto& ex : valid) {
    valid_views.push_back(ex.features);
    valid_labels.push_back(ex.label);
  }

  TrainResult result;
  result.class_weights = weights;
  Model model = initial;
  Trainer trainer(model, weights);
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  batch.reserve(config.batch_size);

  double lr = config.lr_init;
  double best_f1 = -1.0;
  double best_valid_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_f1 = 0;
  std::size_t epochs_since_loss = 0;
  TensorList best_parameters = model.parameters;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);
      loss_sum += trainer.Step(batch, lr) * static_cast<double>(batch.size());
    }

    // Score what would be saved: the float32-rounded parameters.
    Model snapshot = model;
    RoundToFloat(snapshot.parameters);
    const auto probs = Forward(snapshot, valid_views);
    EpochRecord record;
    record.epoch = epoch;
    record.learning_rate = lr;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    record.valid_loss = WeightedBce(probs, valid_labels, weights);
    record.valid_macro_f1 = MacroF1(ThresholdVerdicts(probs), valid_labels).macro_f1;
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.valid_macro_f1 > best_f1) {
      best_f1 = record.valid_macro_f1;
      best_parameters = std::move(snapshot.parameters);
      result.best_epoch = epoch;
      epochs_since_f1 = 0;
    } else {
      ++epochs_since_f1;
    }

    if (record.valid_loss < best_valid_loss) {
      best_valid_loss = record.valid_loss;
      epochs_since_loss = 0;
    } else if (++epochs_since_loss >= config.plateau_patience) {
      lr = std::max(lr * config.lr_decay_factor, config.lr_min);
      epochs_since_loss = 0;
    }

    if (epochs_since_f1 >= config.early_stop_patience) break;
  }

  model.parameters = std::move(best_parameters);
  model.meta.train_config_digest = config.Digest();
  result.model = std::move(model);
  return result;
}

}  // namespace soundguard::nn
