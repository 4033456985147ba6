#include "soundguard/nn/tensor.hpp"

namespace soundguard::nn {

TensorList ZerosLike(const TensorList& tensors) {
  TensorList out;
  out.reserve(tensors.size());
  for (const auto& t : tensors) out.emplace_back(t.name, t.shape);
  return out;
}

const Tensor* FindTensor(const TensorList& tensors, std::string_view name) {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

double SquaredNorm(const TensorList& tensors) {
  double sum = 0.0;
  for (const auto& t : tensors) {
    for (double v : t.data) sum += v * v;
  }
  return sum;
}

void RoundToFloat(TensorList& tensors) {
  for (auto& t : tensors) {
    for (double& v : t.data) v = static_cast<float>(v);
  }
}

}  // namespace soundguard::nn
