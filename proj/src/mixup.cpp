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
#include "amplab/mixup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amplab/errors.hpp"
#include "amplab/ops.hpp"

namespace amplab {

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::kNone:
      return "none";
    case Policy::kMixup:
      return "mixup";
    case Policy::kAmp:
      return "amp";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  if (name == "none") return Policy::kNone;
  if (name == "mixup") return Policy::kMixup;
  if (name == "amp") return Policy::kAmp;
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected none|mixup|amp)");
}

void MixConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be nonnegative");
  if (layer != kWordLayer && layer != kSentLayer) {
    throw ConfigError("unknown mix layer '" + layer + "'");
  }
}

void MixConfig::validate(const Model& model) const {
  validate();
  if (!model.has_layer(layer)) throw ConfigError("model has no layer '" + layer + "'");
}

std::vector<double> sample_lambda(double alpha, std::size_t n, Rng& rng) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive, got " + std::to_string(alpha));
  std::vector<double> out(n);
  for (double& v : out) v = rng.beta(alpha, alpha);
  return out;
}

std::vector<std::size_t> pair_batch(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

Var mix_hidden(Var g_i, Var g_j, Var lambda) {
  if (g_i.shape() != g_j.shape()) {
    throw DimensionError("mix_hidden: " + shape_str(g_i.shape()) + " vs " + shape_str(g_j.shape()));
  }
  Var one_minus = ops::affine(lambda, -1.0, 1.0);
  return ops::add(ops::scale_rows(g_i, lambda), ops::scale_rows(g_j, one_minus));
}

Hidden mix_hidden(const Hidden& g, std::span<const std::size_t> partner, Var lambda) {
  Var g_j = ops::gather_rows(g.value, partner);
  Hidden out{mix_hidden(g.value, g_j, lambda), g.valid_lens, g.layer};
  if (g.layer == kWordLayer) {
    const Tensor& lam = lambda.value();
    for (std::size_t s = 0; s < out.valid_lens.size(); ++s) {
      const std::size_t len_i = g.valid_lens[s];
      const std::size_t len_j = g.valid_lens[partner[s]];
      std::size_t len = 0;
      if (lam[s] > 0.0) len = len_i;
      if (lam[s] < 1.0) len = std::max(len, len_j);
      out.valid_lens[s] = len;
    }
  }
  return out;
}

Tensor mix_labels(const Tensor& y_i, const Tensor& y_j, std::span<const double> lambda) {
  if (y_i.shape != y_j.shape || y_i.rank() != 2 || lambda.size() != y_i.dim(0)) {
    throw DimensionError("mix_labels: " + shape_str(y_i.shape) + " vs " + shape_str(y_j.shape) +
                         " with " + std::to_string(lambda.size()) + " coefficients");
  }
  Tensor out = Tensor::zeros(y_i.shape);
  const std::size_t c = y_i.dim(1);
  for (std::size_t r = 0; r < lambda.size(); ++r) {
    for (std::size_t k = 0; k < c; ++k) {
      out[r * c + k] = y_i[r * c + k] * lambda[r] + y_j[r * c + k] * (1.0 - lambda[r]);
    }
  }
  return out;
}

Var mixup_loss(Var logits, const Tensor& y_i, const Tensor& y_j, Var lambda) {
  const std::size_t n = logits.shape().at(0);
  if (lambda.shape() != Shape{n}) {
    throw DimensionError("mixup_loss: lambda " + shape_str(lambda.shape()) + " for batch of " +
                         std::to_string(n));
  }
  Var ce_i = ops::softmax_cross_entropy(logits, y_i);
  Var ce_j = ops::softmax_cross_entropy(logits, y_j);
  return ops::add(ops::mul(lambda, ce_i), ops::mul(ops::affine(lambda, -1.0, 1.0), ce_j));
}

Var mixup_loss(Var logits, const Tensor& y_i, const Tensor& y_j, std::span<const double> lambda) {
  Var weights = logits.tape->constant(
      Tensor({lambda.size()}, std::vector<double>(lambda.begin(), lambda.end())));
  return mixup_loss(logits, y_i, y_j, weights);
}

Tensor permute_rows(const Tensor& labels, std::span<const std::size_t> index) {
  const std::size_t c = labels.dim(1);
  Tensor out = Tensor::zeros({index.size(), c});
  for (std::size_t r = 0; r < index.size(); ++r) {
    for (std::size_t k = 0; k < c; ++k) out[r * c + k] = labels[index[r] * c + k];
  }
  return out;
}

RandOpResult rand_op(Model& model, Tape& tape, const Batch& batch, const MixConfig& config,
                     Rng& mix_rng, const ForwardContext& ctx, const RandOpOptions& options) {
  config.validate(model);
  const std::size_t n = batch.size();
  if (n == 0) throw ContractError("rand_op: empty batch");

  std::vector<double> lambda = sample_lambda(config.alpha, config.per_pair_lambda ? n : 1, mix_rng);
  if (!config.per_pair_lambda) lambda.assign(n, lambda.front());
  std::vector<std::size_t> partner = pair_batch(n, mix_rng);
  if (options.forced_lambda) lambda.assign(n, *options.forced_lambda);

  RandOpResult r;
  r.prefix = forward_to_layer(model, tape, batch, config.layer);
  r.lambda_leaf = tape.variable(Tensor({n}, lambda));
  r.mix.mixed_hidden = mix_hidden(r.prefix, partner, r.lambda_leaf);
  r.logits = forward_from_layer(model, tape, r.mix.mixed_hidden, ctx);
  r.labels_i = batch.labels;
  r.labels_j = permute_rows(batch.labels, partner);
  r.loss = mixup_loss(r.logits, r.labels_i, r.labels_j, r.lambda_leaf);
  r.mix.mixed_labels = mix_labels(r.labels_i, r.labels_j, lambda);
  r.mix.j_index = std::move(partner);
  r.mix.lambda = std::move(lambda);
  r.mix.layer = config.layer;
  return r;
}

}  // namespace amplab
