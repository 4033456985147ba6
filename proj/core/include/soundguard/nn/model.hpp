#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soundguard/cmvn.hpp"
#include "soundguard/features.hpp"
#include "soundguard/nn/tensor.hpp"
#include "soundguard/segmenter.hpp"

namespace soundguard::nn {

enum class ModelKind { kFfnn, kCnn };

std::string_view ModelKindName(ModelKind kind);  // "FFNN" / "CNN"
ModelKind ParseModelKind(std::string_view name);

/// Topology. The FFNN reads a pooled vector (per-coefficient mean then
/// standard deviation over frames, 2F values) through ReLU dense layers
/// `dense_units`. The CNN convolves along time with F input channels:
/// `conv_layers` x [conv1d(conv_filters, kernel_size, stride) + ReLU +
/// max-pool(pool_size)], global average pooling over time, a ReLU dense
/// layer of `head_units`. Both end in one sigmoid unit.
struct ModelSpec {
  ModelKind kind = ModelKind::kCnn;
  std::size_t input_frames = 0;  // frames per training segment (CNN)
  std::size_t input_dims = 0;    // F
  std::vector<std::size_t> dense_units = {32, 16};
  std::size_t conv_filters = 32;
  std::size_t conv_layers = 2;
  std::size_t kernel_size = 2;
  std::size_t stride = 1;
  std::size_t pool_size = 2;
  std::size_t head_units = 16;
  std::uint64_t seed = 0;

  static ModelSpec Ffnn(std::size_t input_dims, std::uint64_t seed);
  static ModelSpec Cnn(std::size_t input_frames, std::size_t input_dims, std::uint64_t seed);

  /// Throws Error(kConfig) on inconsistent shapes.
  void Validate() const;
  /// Length of the FFNN input vector.
  std::size_t pooled_dims() const { return 2 * input_dims; }
  /// Fewest frames a CNN input may have (every stage keeps >= 1 step).
  std::size_t MinFrames() const;

  bool operator==(const ModelSpec&) const = default;
};

/// Time length after each CNN stage for `frames` input frames:
/// {conv_1, pool_1, conv_2, pool_2, ...}, conv: floor((L - k) / s) + 1,
/// pool: floor(L / p). Entries are 0 once the input is too short.
std::vector<std::size_t> CnnStageLengths(const ModelSpec& spec, std::size_t frames);

/// What the model was trained on, kept with it so inference can rebuild the
/// exact front end.
struct ModelMetadata {
  FeatureKind feature_kind = FeatureKind::kLogMel;
  FeatureConfig feature_config;
  SegmentParams segment;
  CmvnStats cmvn;
  double validation_threshold = 0.5;
  std::string train_config_digest;

  bool operator==(const ModelMetadata&) const = default;
};

struct Model {
  ModelSpec spec;
  TensorList parameters;
  ModelMetadata meta;
};

/// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out)); conv fans
/// are kernel x channels) drawn from the spec seed and rounded to float32;
/// zero biases.
Model InitModel(const ModelSpec& spec);

/// Parameter names and shapes for `spec`, zero-filled.
TensorList ParameterLayout(const ModelSpec& spec);

/// Mean then population standard deviation of each column.
std::vector<double> PoolMeanStd(const FeatureView& features);

/// Sigmoid output for each input. Throws Error(kInvalidInput) on a width
/// mismatch or an input too short for the CNN.
std::vector<double> Forward(const Model& model, std::span<const FeatureView> batch);
double Forward(const Model& model, const FeatureView& input);

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double of(int label) const { return label == 1 ? positive : negative; }
};

/// w_c = N / (2 N_c). Throws Error(kInsufficientData) when a class is absent.
ClassWeights BalancedClassWeights(std::size_t n_negative, std::size_t n_positive);

inline constexpr double kProbabilityClamp = 1e-7;

/// mean_i w_{y_i} [-y_i ln p_i - (1 - y_i) ln(1 - p_i)], p clamped to
/// [1e-7, 1 - 1e-7].
double WeightedBce(std::span<const double> probabilities, std::span<const int> labels,
                   const ClassWeights& weights);

struct LossAndGradients {
  double loss = 0.0;
  std::vector<double> probabilities;
  TensorList gradients;
};

/// Weighted BCE of the batch and its exact gradient with respect to every
/// parameter (derivative is zero where the probability clamp is active).
LossAndGradients Backward(const Model& model, std::span<const FeatureView> batch,
                          std::span<const int> labels, const ClassWeights& weights);

}  // namespace soundguard::nn
