#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace soundguard::nn {

/// Named dense array of doubles.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::string n, std::vector<std::size_t> s)
      : name(std::move(n)), shape(std::move(s)),
        data(std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>()), 0.0) {}

  std::size_t size() const { return data.size(); }

  bool operator==(const Tensor&) const = default;
};

/// Parameters or gradients, in a fixed order defined by the model topology.
using TensorList = std::vector<Tensor>;

/// Same names and shapes, all zeros.
TensorList ZerosLike(const TensorList& tensors);

const Tensor* FindTensor(const TensorList& tensors, std::string_view name);

double SquaredNorm(const TensorList& tensors);

/// Rounds every element to the nearest float32 value.
void RoundToFloat(TensorList& tensors);

}  // namespace soundguard::nn
