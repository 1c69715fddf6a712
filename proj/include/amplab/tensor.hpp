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
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amplab {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient accumulator.
/// A scalar has an empty shape.
struct Tensor {
  Shape shape;
  std::vector<double> values;
  bool requires_grad = false;
  std::optional<std::vector<double>> grad;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> v, bool needs_grad = false);

  static Tensor zeros(Shape s, bool needs_grad = false);
  static Tensor filled(Shape s, double value);
  static Tensor scalar(double value);

  std::size_t numel() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t axis) const { return shape.at(axis); }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double& at(std::size_t r, std::size_t c) { return values[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * shape[1] + c]; }

  /// Adds `g` into the accumulator, allocating it on first use.
  void accumulate_grad(std::span<const double> g);
  void zero_grad();
  bool all_finite() const;
};

}  // namespace amplab
