#pragma once

#include <cstdint>
#include <vector>

#include "soundguard/nn/tensor.hpp"

namespace soundguard::nn {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  /// Zero moments shaped like `parameters`.
  static AdamState For(const TensorList& parameters);
};

/// One bias-corrected Adam update. Throws Error(kTraining) naming the
/// offending parameter if any gradient is NaN or infinite; nothing is
/// modified in that case.
void AdamStep(TensorList& parameters, const TensorList& gradients, AdamState& state, double lr);

}  // namespace soundguard::nn
