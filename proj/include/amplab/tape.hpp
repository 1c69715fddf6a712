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
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amplab/tensor.hpp"

namespace amplab {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  bool valid() const { return tape != nullptr; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape; }
};

enum class GradMode { kEnabled, kDisabled };

/// View handed to an op's backward rule.
class BackwardContext {
 public:
  std::span<const double> grad_out() const { return grad_out_; }
  const Tensor& output() const { return *output_; }
  const Tensor& input(std::size_t k) const { return *inputs_[k]; }
  /// Adjoint buffer of input k; empty when that input needs no gradient.
  std::span<double> grad_in(std::size_t k) const { return grad_in_[k]; }
  bool needs_grad(std::size_t k) const { return !grad_in_[k].empty(); }

 private:
  friend class Tape;
  std::span<const double> grad_out_;
  const Tensor* output_ = nullptr;
  std::vector<const Tensor*> inputs_;
  std::vector<std::span<double>> grad_in_;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

/// Define-by-run reverse-mode tape. Nodes are stored in creation order, which
/// is a topological order because an op can only consume existing nodes.
///
/// Leaves created with `leaf()` alias an external Tensor (a model parameter);
/// `backward()` accumulates into that tensor's `grad`. The external tensor
/// must outlive the tape and must not be resized while the tape is alive.
/// References returned by value() stay valid for the tape's lifetime.
class Tape {
 public:
  explicit Tape(GradMode mode = GradMode::kEnabled) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor& external);
  /// Owned leaf that participates in differentiation (e.g. mixing coefficients).
  Var variable(Tensor value);
  Var constant(Tensor value);

  /// Appends an op node. `backward` may be empty for non-differentiable ops.
  Var record(std::string_view op, std::span<const Var> inputs, Tensor output, BackwardFn backward);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  std::string_view op_name(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  GradMode mode() const { return mode_; }

  /// Reverse pass from a scalar root. Accumulates d(root)/d(leaf) into every
  /// requires-grad leaf; callers zero gradients between steps.
  void backward(Var root);

  /// Reverse pass that returns d(root)/d(v) for each v in `wrt` without
  /// touching any leaf accumulator. `wrt` may name intermediate nodes.
  std::vector<std::vector<double>> gradients(Var root, std::span<const Var> wrt);

  /// Accumulated gradient of an owned `variable()` leaf.
  const std::optional<std::vector<double>>& grad(Var v) const;

  /// Nodes processed by the most recent reverse pass.
  std::size_t last_backward_visits() const { return last_visits_; }

  /// Test hook: negates the backward contribution of every node of `op`.
  void inject_sign_flip(std::string op) { sign_flip_op_ = std::move(op); }

 private:
  struct Node {
    std::string op;
    std::vector<std::size_t> inputs;
    Tensor owned;
    Tensor* external = nullptr;
    bool requires_grad = false;
    bool is_leaf = false;
    BackwardFn backward;

    const Tensor& tensor() const { return external ? *external : owned; }
  };

  void check_var(Var v) const;
  std::vector<std::vector<double>> run_reverse(Var root, bool accumulate);

  GradMode mode_;
  std::deque<Node> nodes_;
  std::size_t last_visits_ = 0;
  std::string sign_flip_op_;
};

}  // namespace amplab
