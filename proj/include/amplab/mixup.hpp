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
#include <string_view>
#include <vector>

#include "amplab/batch.hpp"
#include "amplab/models.hpp"
#include "amplab/rng.hpp"
#include "amplab/tape.hpp"

namespace amplab {

enum class Policy { kNone, kMixup, kAmp };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view name);

struct MixConfig {
  Policy policy = Policy::kMixup;
  double alpha = 1.0;       // Beta(alpha, alpha)
  double epsilon = 0.002;   // lambda step size
  std::string layer = std::string(kSentLayer);
  bool per_pair_lambda = true;

  void validate() const;
  void validate(const Model& model) const;
};

/// i.i.d. Beta(alpha, alpha) draws.
std::vector<double> sample_lambda(double alpha, std::size_t n, Rng& rng);

/// Uniform random partner permutation (Fisher-Yates). Self-pairs allowed.
std::vector<std::size_t> pair_batch(std::size_t n, Rng& rng);

/// g_i * lambda + g_j * (1 - lambda), lambda scaling each leading slice.
Var mix_hidden(Var g_i, Var g_j, Var lambda);

/// Mixes a layer activation with its permuted copy. At the word layer the
/// mixed valid length is the larger of the two partners' lengths, counting
/// only partners with nonzero weight.
Hidden mix_hidden(const Hidden& g, std::span<const std::size_t> partner, Var lambda);

/// y_i * lambda + y_j * (1 - lambda) row by row. Not recorded on any tape.
Tensor mix_labels(const Tensor& y_i, const Tensor& y_j, std::span<const double> lambda);

/// Per-sample lambda * ce(logits, y_i) + (1 - lambda) * ce(logits, y_j).
Var mixup_loss(Var logits, const Tensor& y_i, const Tensor& y_j, Var lambda);
/// Same loss with constant label weights.
Var mixup_loss(Var logits, const Tensor& y_i, const Tensor& y_j, std::span<const double> lambda);

struct MixBatch {
  std::vector<std::size_t> j_index;
  std::vector<double> lambda;
  Hidden mixed_hidden;
  Tensor mixed_labels;
  std::string layer;
};

struct RandOpResult {
  MixBatch mix;
  Hidden prefix;        // unmixed g_k(x), reused when re-mixing
  Var lambda_leaf;      // differentiable [n] leaf
  Var logits;
  Var loss;             // per-sample mixup loss [n]
  Tensor labels_i;
  Tensor labels_j;
};

struct RandOpOptions {
  /// Test hook: overrides every sampled lambda after the rng draws.
  std::optional<double> forced_lambda;
};

/// Samples lambda (then the pairing) from `mix_rng`, mixes at config.layer
/// and evaluates the suffix network.
RandOpResult rand_op(Model& model, Tape& tape, const Batch& batch, const MixConfig& config,
                     Rng& mix_rng, const ForwardContext& ctx = {}, const RandOpOptions& options = {});

/// Rows of `labels` reordered by `index`.
Tensor permute_rows(const Tensor& labels, std::span<const std::size_t> index);

}  // namespace amplab
