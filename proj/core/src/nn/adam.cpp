#include "soundguard/nn/adam.hpp"

#include <cmath>

#include "soundguard/error.hpp"

namespace soundguard::nn {

AdamState AdamState::For(const TensorList& parameters) {
  AdamState state;
  for (const auto& t : parameters) {
    state.first_moment.emplace_back(t.size(), 0.0);
    state.second_moment.emplace_back(t.size(), 0.0);
  }
  return state;
}

void AdamStep(TensorList& parameters, const TensorList& gradients, AdamState& state, double lr) {
  if (parameters.size() != gradients.size() || parameters.size() != state.first_moment.size()) {
    Fail(ErrorKind::kInvalidInput, "parameter, gradient and optimizer state counts differ");
  }
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    const auto& g = gradients[k].data;
    if (g.size() != parameters[k].size() || state.first_moment[k].size() != g.size()) {
      Fail(ErrorKind::kInvalidInput, "shape mismatch for parameter " + parameters[k].name);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        Fail(ErrorKind::kTraining, "non-finite gradient " + std::to_string(g[i]) + " for " +
                                       parameters[k].name + "[" + std::to_string(i) +
                                       "] at step " + std::to_string(state.step + 1));
      }
    }
  }

  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    auto& p = parameters[k].data;
    const auto& g = gradients[k].data;
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace soundguard::nn
