/**
 * Copyright 2026 The amplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "amplab/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "amplab/errors.hpp"

namespace amplab {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape s, std::vector<double> v, bool needs_grad)
    : shape(std::move(s)), values(std::move(v)), requires_grad(needs_grad) {
  if (values.size() != shape_numel(shape)) {
    throw DimensionError("tensor of shape " + shape_str(shape) + " given " +
                         std::to_string(values.size()) + " values");
  }
}

Tensor Tensor::zeros(Shape s, bool needs_grad) {
  const std::size_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(n, 0.0), needs_grad);
}

Tensor Tensor::filled(Shape s, double value) {
  const std::size_t n = shape_numel(s);
  return Tensor(std::move(s), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

void Tensor::accumulate_grad(std::span<const double> g) {
  if (g.size() != values.size()) {
    throw DimensionError("gradient of size " + std::to_string(g.size()) +
                         " for tensor of shape " + shape_str(shape));
  }
  if (!grad) grad.emplace(values.size(), 0.0);
  auto& acc = *grad;
  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
}

void Tensor::zero_grad() {
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
}

bool Tensor::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace amplab
