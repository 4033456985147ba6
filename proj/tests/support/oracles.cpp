#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace soundguard::oracle {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> PeriodicHann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
  }
  return w;
}

std::vector<double> DirectPowerSpectrum(std::span<const double> frame, std::size_t fft_size) {
  std::vector<double> power(fft_size / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frame.size(); ++n) {
      const double angle = -2.0 * kPi * static_cast<double>(k * n % fft_size) /
                           static_cast<double>(fft_size);
      re += frame[n] * std::cos(angle);
      im += frame[n] * std::sin(angle);
    }
    power[k] = re * re + im * im;
  }
  return power;
}

double HtkMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double HtkMelInverse(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<std::vector<double>> MelWeights(const FeatureConfig& config) {
  const std::size_t bins = config.fft_size / 2 + 1;
  const double lo_mel = HtkMel(config.fmin);
  const double hi_mel = HtkMel(config.fmax);
  const double step = (hi_mel - lo_mel) / static_cast<double>(config.n_mels + 1);
  std::vector<std::vector<double>> weights(config.n_mels, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < config.n_mels; ++m) {
    const double left = HtkMelInverse(lo_mel + step * static_cast<double>(m));
    const double centre = HtkMelInverse(lo_mel + step * static_cast<double>(m + 1));
    const double right = HtkMelInverse(lo_mel + step * static_cast<double>(m + 2));
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * config.sample_rate / static_cast<double>(config.fft_size);
      const double rise = (hz - left) / (centre - left);
      const double fall = (right - hz) / (right - centre);
      weights[m][k] = std::max(0.0, std::min(rise, fall));
    }
  }
  return weights;
}

std::vector<double> DirectDct(std::span<const double> x, std::size_t n_out) {
  const double n = static_cast<double>(x.size());
  std::vector<double> out(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += x[i] * std::cos(kPi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / n);
    }
    out[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
  }
  return out;
}

std::vector<double> LogMelFrame(std::span<const float> samples, const FeatureConfig& config) {
  const auto window = PeriodicHann(config.frame_len);
  std::vector<double> frame(config.frame_len);
  for (std::size_t i = 0; i < config.frame_len; ++i) frame[i] = samples[i] * window[i];
  const auto power = DirectPowerSpectrum(frame, config.fft_size);
  const auto weights = MelWeights(config);
  std::vector<double> out(config.n_mels);
  for (std::size_t m = 0; m < config.n_mels; ++m) {
    double energy = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) energy += weights[m][k] * power[k];
    out[m] = std::log(std::max(energy, config.log_floor));
  }
  return out;
}

std::vector<double> MfccFrame(std::span<const float> samples, const FeatureConfig& config) {
  const auto log_mel = LogMelFrame(samples, config);
  auto full = DirectDct(log_mel, config.n_mfcc + 1);
  return {full.begin() + 1, full.end()};
}

Confusion Count(std::span<const int> predictions, std::span<const int> labels) {
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool y = labels[i] == 1;
    c.tp += p && y;
    c.fp += p && !y;
    c.fn += !p && y;
    c.tn += !p && !y;
  }
  return c;
}

namespace {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

Fraction ClassF1(std::size_t hits, std::size_t misses) {
  const auto den = static_cast<std::int64_t>(2 * hits + misses);
  if (den == 0) return {0, 1};
  return {static_cast<std::int64_t>(2 * hits), den};
}

Fraction MacroFraction(const Confusion& c) {
  const Fraction a = ClassF1(c.tp, c.fp + c.fn);
  const Fraction b = ClassF1(c.tn, c.fp + c.fn);
  return {a.num * b.den + b.num * a.den, 2 * a.den * b.den};
}

}  // namespace

double MacroF1(const Confusion& c) {
  const Fraction f = MacroFraction(c);
  return static_cast<double>(f.num) / static_cast<double>(f.den);
}

double Mean(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  return sum / static_cast<double>(probs.size());
}

int MeanAbove(std::span<const double> probs, double threshold) {
  return Mean(probs) > threshold ? 1 : 0;
}

int Majority(std::span<const double> probs) {
  std::size_t ones = 0;
  for (double p : probs) ones += p > 0.5;
  return 2 * ones > probs.size() ? 1 : 0;
}

double BestThreshold(std::span<const Clip> validation) {
  std::vector<int> labels;
  for (const auto& c : validation) labels.push_back(c.label);
  double best_t = 0.0;
  Fraction best{-1, 1};
  for (int k = 0; k < 10; ++k) {
    const double t = k / 10.0;
    std::vector<int> preds;
    for (const auto& c : validation) preds.push_back(MeanAbove(c.probs, t));
    const Fraction f = MacroFraction(Count(preds, labels));
    if (f.num * best.den > best.num * f.den) {
      best = f;
      best_t = t;
    }
  }
  return best_t;
}

std::vector<std::vector<double>> NumericGradients(const nn::Model& model,
                                                  std::span<const FeatureView> batch,
                                                  std::span<const int> labels,
                                                  const nn::ClassWeights& weights, double h) {
  nn::Model probe = model;
  auto loss = [&] {
    const auto probs = nn::Forward(probe, batch);
    return nn::WeightedBce(probs, labels, weights);
  };
  std::vector<std::vector<double>> grads;
  for (auto& tensor : probe.parameters) {
    std::vector<double> g(tensor.size());
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double saved = tensor.data[i];
      tensor.data[i] = saved + h;
      const double up = loss();
      tensor.data[i] = saved - h;
      const double down = loss();
      tensor.data[i] = saved;
      g[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

GradientCheck CheckGradients(const nn::Model& model, std::span<const FeatureView> batch,
                             std::span<const int> labels, const nn::ClassWeights& weights,
                             double h, double floor) {
  const nn::LossAndGradients analytic = nn::Backward(model, batch, labels, weights);
  const auto numeric = NumericGradients(model, batch, labels, weights, h);
  GradientCheck result;
  for (std::size_t p = 0; p < numeric.size(); ++p) {
    const auto& a = analytic.gradients[p].data;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double n = numeric[p][i];
      const double err = std::abs(a[i] - n) / std::max({std::abs(a[i]), std::abs(n), floor});
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = model.parameters[p].name;
        result.worst_index = i;
      }
      ++result.checked;
    }
  }
  return result;
}

}  // namespace soundguard::oracle
