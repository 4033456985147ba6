#include <algorithm>
#include <cmath>
#include <cstdint>

#include "soundguard/error.hpp"
#include "soundguard/nn/model.hpp"
#include "soundguard/rng.hpp"

namespace soundguard::nn {

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kFfnn ? "FFNN" : "CNN";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "ffnn" || name == "FFNN") return ModelKind::kFfnn;
  if (name == "cnn" || name == "CNN") return ModelKind::kCnn;
  Fail(ErrorKind::kConfig, "unknown model kind '" + std::string(name) + "'");
}

ModelSpec ModelSpec::Ffnn(std::size_t input_dims, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = ModelKind::kFfnn;
  spec.input_dims = input_dims;
  spec.seed = seed;
  return spec;
}

ModelSpec ModelSpec::Cnn(std::size_t input_frames, std::size_t input_dims, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = ModelKind::kCnn;
  spec.input_frames = input_frames;
  spec.input_dims = input_dims;
  spec.seed = seed;
  return spec;
}

std::vector<std::size_t> CnnStageLengths(const ModelSpec& spec, std::size_t frames) {
  std::vector<std::size_t> lengths;
  std::size_t length = frames;
  for (std::size_t l = 0; l < spec.conv_layers; ++l) {
    length = length >= spec.kernel_size ? (length - spec.kernel_size) / spec.stride + 1 : 0;
    lengths.push_back(length);
    length /= spec.pool_size;
    lengths.push_back(length);
  }
  return lengths;
}

std::size_t ModelSpec::MinFrames() const {
  if (kind == ModelKind::kFfnn) return 1;
  std::size_t frames = 1;
  while (CnnStageLengths(*this, frames).back() == 0) ++frames;
  return frames;
}

void ModelSpec::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) Fail(ErrorKind::kConfig, std::string("invalid model spec: ") + what);
  };
  require(input_dims > 0, "input_dims must be positive");
  if (kind == ModelKind::kFfnn) {
    require(!dense_units.empty(), "FFNN needs at least one hidden layer");
    require(std::all_of(dense_units.begin(), dense_units.end(), [](auto u) { return u > 0; }),
            "dense units must be positive");
  } else {
    require(conv_layers > 0 && conv_filters > 0 && head_units > 0, "CNN sizes must be positive");
    require(kernel_size > 0 && stride > 0 && pool_size > 0, "kernel, stride and pool must be positive");
    if (input_frames != 0) {
      require(CnnStageLengths(*this, input_frames).back() > 0, "input_frames too short for the CNN");
    }
  }
}

TensorList ParameterLayout(const ModelSpec& spec) {
  spec.Validate();
  TensorList params;
  std::size_t last = 0;
  if (spec.kind == ModelKind::kFfnn) {
    std::size_t in = spec.pooled_dims();
    for (std::size_t i = 0; i < spec.dense_units.size(); ++i) {
      const std::string prefix = "dense" + std::to_string(i + 1);
      params.emplace_back(prefix + ".weight", std::vector<std::size_t>{spec.dense_units[i], in});
      params.emplace_back(prefix + ".bias", std::vector<std::size_t>{spec.dense_units[i]});
      in = spec.dense_units[i];
    }
    last = in;
  } else {
    std::size_t channels = spec.input_dims;
    for (std::size_t i = 0; i < spec.conv_layers; ++i) {
      const std::string prefix = "conv" + std::to_string(i + 1);
      params.emplace_back(prefix + ".weight",
                          std::vector<std::size_t>{spec.conv_filters, spec.kernel_size, channels});
      params.emplace_back(prefix + ".bias", std::vector<std::size_t>{spec.conv_filters});
      channels = spec.conv_filters;
    }
    params.emplace_back("dense1.weight", std::vector<std::size_t>{spec.head_units, channels});
    params.emplace_back("dense1.bias", std::vector<std::size_t>{spec.head_units});
    last = spec.head_units;
  }
  params.emplace_back("output.weight", std::vector<std::size_t>{1, last});
  params.emplace_back("output.bias", std::vector<std::size_t>{1});
  return params;
}

Model InitModel(const ModelSpec& spec) {
  Model model;
  model.spec = spec;
  model.parameters = ParameterLayout(spec);
  Rng rng(spec.seed);
  for (auto& t : model.parameters) {
    if (t.shape.size() == 1) continue;  // bias
    std::size_t fan_in = 0, fan_out = 0;
    if (t.shape.size() == 2) {
      fan_out = t.shape[0];
      fan_in = t.shape[1];
    } else {
      fan_out = t.shape[0] * t.shape[1];
      fan_in = t.shape[1] * t.shape[2];
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : t.data) w = static_cast<float>(rng.Uniform(-limit, limit));
  }
  return model;
}

std::vector<double> PoolMeanStd(const FeatureView& features) {
  const std::size_t dims = features.dims;
  std::vector<double> pooled(2 * dims, 0.0);
  if (features.frames == 0) Fail(ErrorKind::kInvalidInput, "cannot pool zero frames");
  const auto n = static_cast<double>(features.frames);
  for (std::size_t t = 0; t < features.frames; ++t) {
    const auto row = features.row(t);
    for (std::size_t f = 0; f < dims; ++f) pooled[f] += row[f];
  }
  for (std::size_t f = 0; f < dims; ++f) pooled[f] /= n;
  for (std::size_t t = 0; t < features.frames; ++t) {
    const auto row = features.row(t);
    for (std::size_t f = 0; f < dims; ++f) {
      const double d = row[f] - pooled[f];
      pooled[dims + f] += d * d;
    }
  }
  for (std::size_t f = 0; f < dims; ++f) pooled[dims + f] = std::sqrt(pooled[dims + f] / n);
  return pooled;
}

ClassWeights BalancedClassWeights(std::size_t n_negative, std::size_t n_positive) {
  if (n_negative == 0 || n_positive == 0) {
    Fail(ErrorKind::kInsufficientData, "class weighting needs examples of both classes");
  }
  const auto total = static_cast<double>(n_negative + n_positive);
  return {total / (2.0 * n_negative), total / (2.0 * n_positive)};
}

namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double ClampProbability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double SampleLoss(double p, int label) {
  const double q = ClampProbability(p);
  return label == 1 ? -std::log(q) : -std::log(1.0 - q);
}

// z = W x + b, W row-major [out, in].
void DenseForward(const Tensor& w, const Tensor& b, const double* x, double* z) {
  const std::size_t out = w.shape[0], in = w.shape[1];
  for (std::size_t o = 0; o < out; ++o) {
    const double* row = w.data.data() + o * in;
    double acc = b.data[o];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    z[o] = acc;
  }
}

// Accumulates dW, db and optionally dx for z = W x + b given dz.
void DenseBackward(const Tensor& w, const double* x, const double* dz, Tensor& dw, Tensor& db,
                   double* dx) {
  const std::size_t out = w.shape[0], in = w.shape[1];
  for (std::size_t o = 0; o < out; ++o) {
    const double g = dz[o];
    if (g == 0.0) continue;
    db.data[o] += g;
    double* grow = dw.data.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) grow[i] += g * x[i];
    if (dx != nullptr) {
      const double* row = w.data.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dx[i] += g * row[i];
    }
  }
}

void ReluInPlace(std::span<double> v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

void CheckInput(const ModelSpec& spec, const FeatureView& input) {
  if (input.dims != spec.input_dims) {
    Fail(ErrorKind::kInvalidInput, "model expects " + std::to_string(spec.input_dims) +
                                       " coefficients per frame, got " +
                                       std::to_string(input.dims));
  }
  if (input.frames < spec.MinFrames()) {
    Fail(ErrorKind::kInvalidInput, "input has " + std::to_string(input.frames) +
                                       " frames; model needs at least " +
                                       std::to_string(spec.MinFrames()));
  }
}

// Per-sample activations kept for the backward pass. Buffers are reused
// across samples of a batch.
class Workspace {
 public:
  explicit Workspace(const Model& model) : model_(model), spec_(model.spec) {
    if (spec_.kind == ModelKind::kCnn) {
      const auto& p = model.parameters;
      for (std::size_t l = 0; l < spec_.conv_layers; ++l) {
        const Tensor& w = p[2 * l];
        const std::size_t filters = w.shape[0], width = w.shape[1] * w.shape[2];
        std::vector<double> wt(width * filters);
        for (std::size_t o = 0; o < filters; ++o) {
          for (std::size_t j = 0; j < width; ++j) wt[j * filters + o] = w.data[o * width + j];
        }
        conv_wt_.push_back(std::move(wt));
      }
      stages_.resize(spec_.conv_layers);
    }
  }

  // Returns the pre-sigmoid logit.
  double Run(const FeatureView& input) {
    return spec_.kind == ModelKind::kFfnn ? RunFfnn(input) : RunCnn(input);
  }

  // Accumulates gradients for the sample last passed to Run, given dL/dlogit.
  void Backprop(const FeatureView& input, double dlogit, TensorList& grads) {
    if (spec_.kind == ModelKind::kFfnn) {
      BackpropFfnn(dlogit, grads);
    } else {
      BackpropCnn(input, dlogit, grads);
    }
  }

 private:
  struct ConvStage {
    std::size_t in_len = 0, in_channels = 0;
    std::size_t conv_len = 0, pool_len = 0;
    std::vector<double> activation;       // conv_len x filters, post-ReLU
    std::vector<double> pooled;           // pool_len x filters
    std::vector<std::uint32_t> argmax;    // pool_len x filters, source row
  };

  double RunFfnn(const FeatureView& input) {
    const auto& p = model_.parameters;
    dense_in_.assign(1, PoolMeanStd(input));
    for (std::size_t i = 0; i < spec_.dense_units.size(); ++i) {
      std::vector<double> z(spec_.dense_units[i]);
      DenseForward(p[2 * i], p[2 * i + 1], dense_in_.back().data(), z.data());
      ReluInPlace(z);
      dense_in_.push_back(std::move(z));
    }
    double logit;
    DenseForward(p[p.size() - 2], p[p.size() - 1], dense_in_.back().data(), &logit);
    return logit;
  }

  void BackpropFfnn(double dlogit, TensorList& grads) {
    const auto& p = model_.parameters;
    const std::size_t n_hidden = spec_.dense_units.size();
    std::vector<double> upstream(dense_in_.back().size(), 0.0);
    DenseBackward(p[p.size() - 2], dense_in_.back().data(), &dlogit, grads[p.size() - 2],
                  grads[p.size() - 1], upstream.data());
    for (std::size_t i = n_hidden; i-- > 0;) {
      const auto& act = dense_in_[i + 1];
      for (std::size_t o = 0; o < act.size(); ++o) {
        if (act[o] <= 0.0) upstream[o] = 0.0;
      }
      std::vector<double> below(i > 0 ? dense_in_[i].size() : 0, 0.0);
      DenseBackward(p[2 * i], dense_in_[i].data(), upstream.data(), grads[2 * i],
                    grads[2 * i + 1], i > 0 ? below.data() : nullptr);
      upstream = std::move(below);
    }
  }

  double RunCnn(const FeatureView& input) {
    const auto& p = model_.parameters;
    const std::size_t filters = spec_.conv_filters;
    const double* x = input.values.data();
    std::size_t len = input.frames;
    std::size_t channels = input.dims;
    for (std::size_t l = 0; l < spec_.conv_layers; ++l) {
      ConvStage& st = stages_[l];
      st.in_len = len;
      st.in_channels = channels;
      st.conv_len = (len - spec_.kernel_size) / spec_.stride + 1;
      st.pool_len = st.conv_len / spec_.pool_size;
      const std::size_t width = spec_.kernel_size * channels;
      const double* bias = p[2 * l + 1].data.data();
      const double* wt = conv_wt_[l].data();

      st.activation.resize(st.conv_len * filters);
      for (std::size_t t = 0; t < st.conv_len; ++t) {
        const double* window = x + t * spec_.stride * channels;
        double* out = st.activation.data() + t * filters;
        for (std::size_t o = 0; o < filters; ++o) out[o] = bias[o];
        for (std::size_t j = 0; j < width; ++j) {
          const double v = window[j];
          const double* wrow = wt + j * filters;
          for (std::size_t o = 0; o < filters; ++o) out[o] += v * wrow[o];
        }
        for (std::size_t o = 0; o < filters; ++o) out[o] = out[o] > 0.0 ? out[o] : 0.0;
      }

      st.pooled.resize(st.pool_len * filters);
      st.argmax.resize(st.pool_len * filters);
      for (std::size_t t = 0; t < st.pool_len; ++t) {
        const std::size_t first = t * spec_.pool_size;
        for (std::size_t o = 0; o < filters; ++o) {
          std::size_t best = first;
          double best_v = st.activation[first * filters + o];
          for (std::size_t r = first + 1; r < first + spec_.pool_size; ++r) {
            const double v = st.activation[r * filters + o];
            if (v > best_v) {
              best_v = v;
              best = r;
            }
          }
          st.pooled[t * filters + o] = best_v;
          st.argmax[t * filters + o] = static_cast<std::uint32_t>(best);
        }
      }
      x = st.pooled.data();
      len = st.pool_len;
      channels = filters;
    }

    gap_.assign(filters, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t o = 0; o < filters; ++o) gap_[o] += x[t * filters + o];
    }
    for (double& g : gap_) g /= static_cast<double>(len);

    const std::size_t head_idx = 2 * spec_.conv_layers;
    head_.resize(spec_.head_units);
    DenseForward(p[head_idx], p[head_idx + 1], gap_.data(), head_.data());
    ReluInPlace(head_);
    double logit;
    DenseForward(p[head_idx + 2], p[head_idx + 3], head_.data(), &logit);
    return logit;
  }

  void BackpropCnn(const FeatureView& input, double dlogit, TensorList& grads) {
    const auto& p = model_.parameters;
    const std::size_t filters = spec_.conv_filters;
    const std::size_t head_idx = 2 * spec_.conv_layers;

    std::vector<double> dhead(spec_.head_units, 0.0);
    DenseBackward(p[head_idx + 2], head_.data(), &dlogit, grads[head_idx + 2],
                  grads[head_idx + 3], dhead.data());
    for (std::size_t o = 0; o < dhead.size(); ++o) {
      if (head_[o] <= 0.0) dhead[o] = 0.0;
    }
    std::vector<double> dgap(filters, 0.0);
    DenseBackward(p[head_idx], gap_.data(), dhead.data(), grads[head_idx], grads[head_idx + 1],
                  dgap.data());

    // Gradient w.r.t. the last pooled map: GAP spreads evenly over time.
    const ConvStage& last = stages_.back();
    dpooled_.assign(last.pool_len * filters, 0.0);
    for (std::size_t t = 0; t < last.pool_len; ++t) {
      for (std::size_t o = 0; o < filters; ++o) {
        dpooled_[t * filters + o] = dgap[o] / static_cast<double>(last.pool_len);
      }
    }

    for (std::size_t l = spec_.conv_layers; l-- > 0;) {
      const ConvStage& st = stages_[l];
      dact_.assign(st.conv_len * filters, 0.0);
      for (std::size_t i = 0; i < st.pool_len * filters; ++i) {
        const std::size_t o = i % filters;
        dact_[st.argmax[i] * filters + o] += dpooled_[i];
      }
      for (std::size_t i = 0; i < dact_.size(); ++i) {
        if (st.activation[i] <= 0.0) dact_[i] = 0.0;
      }

      const double* x = l == 0 ? input.values.data() : stages_[l - 1].pooled.data();
      const std::size_t width = spec_.kernel_size * st.in_channels;
      const double* w = p[2 * l].data.data();
      double* dw = grads[2 * l].data.data();
      double* db = grads[2 * l + 1].data.data();
      const bool need_dx = l > 0;
      if (need_dx) dinput_.assign(st.in_len * st.in_channels, 0.0);
      for (std::size_t t = 0; t < st.conv_len; ++t) {
        const std::size_t offset = t * spec_.stride * st.in_channels;
        const double* window = x + offset;
        for (std::size_t o = 0; o < filters; ++o) {
          const double g = dact_[t * filters + o];
          if (g == 0.0) continue;
          db[o] += g;
          double* dwrow = dw + o * width;
          for (std::size_t j = 0; j < width; ++j) dwrow[j] += g * window[j];
          if (need_dx) {
            const double* wrow = w + o * width;
            double* dwin = dinput_.data() + offset;
            for (std::size_t j = 0; j < width; ++j) dwin[j] += g * wrow[j];
          }
        }
      }
      if (need_dx) dpooled_.swap(dinput_);
    }
  }

  const Model& model_;
  const ModelSpec& spec_;
  std::vector<std::vector<double>> conv_wt_;
  std::vector<ConvStage> stages_;
  std::vector<std::vector<double>> dense_in_;  // FFNN: input then each hidden activation
  std::vector<double> gap_;
  std::vector<double> head_;
  std::vector<double> dpooled_;
  std::vector<double> dact_;
  std::vector<double> dinput_;
};

void CheckLabels(std::span<const FeatureView> batch, std::span<const int> labels) {
  if (batch.size() != labels.size()) Fail(ErrorKind::kInvalidInput, "batch and labels differ in length");
  if (batch.empty()) Fail(ErrorKind::kInvalidInput, "empty batch");
  for (int y : labels) {
    if (y != 0 && y != 1) Fail(ErrorKind::kInvalidInput, "labels must be 0 or 1");
  }
}

}  // namespace

std::vector<double> Forward(const Model& model, std::span<const FeatureView> batch) {
  Workspace ws(model);
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& input : batch) {
    CheckInput(model.spec, input);
    out.push_back(Sigmoid(ws.Run(input)));
  }
  return out;
}

double Forward(const Model& model, const FeatureView& input) {
  return Forward(model, std::span(&input, 1)).front();
}

double WeightedBce(std::span<const double> probabilities, std::span<const int> labels,
                   const ClassWeights& weights) {
  if (probabilities.size() != labels.size() || probabilities.empty()) {
    Fail(ErrorKind::kInvalidInput, "probabilities and labels must be equal-length and non-empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sum += weights.of(labels[i]) * SampleLoss(probabilities[i], labels[i]);
  }
  return sum / static_cast<double>(labels.size());
}

LossAndGradients Backward(const Model& model, std::span<const FeatureView> batch,
                          std::span<const int> labels, const ClassWeights& weights) {
  CheckLabels(batch, labels);
  LossAndGradients result;
  result.gradients = ZerosLike(model.parameters);
  result.probabilities.reserve(batch.size());
  Workspace ws(model);
  const auto n = static_cast<double>(batch.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CheckInput(model.spec, batch[i]);
    const double p = Sigmoid(ws.Run(batch[i]));
    const int y = labels[i];
    const double w = weights.of(y);
    result.probabilities.push_back(p);
    loss_sum += w * SampleLoss(p, y);
    // d/dz of -ln(sigmoid(z)) or -ln(1 - sigmoid(z)) is p - y; zero once clamped.
    const bool clamped = p < kProbabilityClamp || p > 1.0 - kProbabilityClamp;
    const double dlogit = clamped ? 0.0 : w * (p - y) / n;
    ws.Backprop(batch[i], dlogit, result.gradients);
  }
  result.loss = loss_sum / n;
  return result;
}

}  // namespace soundguard::nn
