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
#include <span>
#include <vector>

#include "amplab/tape.hpp"
#include "amplab/tensor.hpp"

/// Differentiable primitives. Every op records its output on the tape of its
/// first operand; mixing operands from different tapes is a ContractError.
namespace amplab::ops {

/// [m x k] * [k x n] -> [m x n].
Var matmul(Var a, Var b);

/// Gathers table rows: [V x d], ids -> [len x d].
Var embedding_lookup(Var table, std::span<const int> ids);

/// Reinterprets the shape; element count must match.
Var reshape(Var x, Shape shape);

/// Mean over the first `valid_len` rows of [len x d] -> [d].
Var mean_pool(Var x, std::size_t valid_len);
/// Batched form: [n x len x d] with per-sample valid lengths -> [n x d].
Var mean_pool(Var x, std::span<const std::size_t> valid_lens);

/// Valid 1-D convolution over time, relu, global max over time.
/// [len x d] with filters [w x d x c] and bias [c] -> [c], or batched
/// [n x len x d] -> [n x c]. Gradient goes to the first argmax position.
Var conv1d_maxpool(Var x, Var filters, Var bias);

Var relu(Var x);
Var tanh(Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Elementwise product of same-shape operands.
Var mul(Var a, Var b);
Var scale(Var x, double factor);
/// a * x + b elementwise.
Var affine(Var x, double a, double b);
/// [n x m] + [m] broadcast over rows.
Var add_row_bias(Var x, Var bias);
/// Multiplies every slice x[s, ...] by s[s]; x is [n x ...], s is [n].
Var scale_rows(Var x, Var s);
/// Selects x[index[r], ...] for each r along the leading axis.
Var gather_rows(Var x, std::span<const std::size_t> index);
/// Concatenates [n x a_k] blocks along columns.
Var concat_cols(std::span<const Var> parts);

/// Per-sample -sum_c target_c * log softmax(logits)_c. Target rows are
/// nonnegative but need not be one-hot.
Var softmax_cross_entropy(Var logits, const Tensor& target);

Var sum(Var x);
Var mean(Var x);

}  // namespace amplab::ops
