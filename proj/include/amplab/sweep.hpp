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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amplab/data.hpp"
#include "amplab/models.hpp"
#include "amplab/vocab.hpp"

namespace amplab {

struct SweepOptions {
  std::string layer = std::string(kSentLayer);
  std::size_t grid_points = 101;
  std::size_t max_len = 32;
  /// Seed of the fixed shuffle that pairs test examples.
  std::uint64_t pair_seed = 7;
  /// Sweep a single (i, j) pair of test indices instead of the whole set.
  std::optional<std::pair<std::size_t, std::size_t>> single_pair;
};

struct SweepRow {
  double lambda = 0.0;
  double loss_a = 0.0;
  double loss_b = 0.0;
};

/// Per-sample mixed loss of each row with `partner[row]` at one lambda, in
/// evaluation mode.
std::vector<double> mixed_losses(const Model& model, const Batch& batch,
                                 std::span<const std::size_t> partner, std::string_view layer,
                                 double lambda);

/// Mean test loss of two models along lambda = k / (grid_points - 1). The
/// test set is shuffled once with pair_seed and position p is paired with
/// position n - 1 - p, so every example is used once as x_i and once as x_j.
std::vector<SweepRow> lambda_sweep(const Model& model_a, const Model& model_b, const Dataset& test,
                                   const Vocab& vocab, const SweepOptions& options);

/// `lambda,loss_model_a,loss_model_b`
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Line plot of both curves.
std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& label_a,
                      const std::string& label_b);

}  // namespace amplab
