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
#include "amplab/amp.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/errors.hpp"
#include "amplab/ops.hpp"

namespace amplab {
namespace {

std::vector<double> values_of(Var v) { return v.value().values; }

LossBundle passive_bundle(const std::vector<double>& loss, const std::vector<double>& lambda) {
  LossBundle b;
  b.loss = loss;
  b.loss_prime = loss;
  b.delta.assign(loss.size(), 0.0);
  b.mask.assign(loss.size(), 0.0);
  b.loss_final = loss;
  b.lambda = lambda;
  b.grad_lambda.assign(loss.size(), 0.0);
  b.lambda_prime = lambda;
  b.lambda_prime_unclamped = lambda;
  return b;
}

}  // namespace

std::vector<double> grad_lambda(Tape& tape, Var loss_sum, Var lambda_leaf) {
  if (lambda_leaf.tape != &tape || tape.op_name(lambda_leaf) != "variable") {
    throw ContractError("grad_lambda: lambda is not a differentiable leaf on this tape");
  }
  const Var wrt[1] = {lambda_leaf};
  return tape.gradients(loss_sum, wrt)[0];
}

std::vector<double> clip_grad(std::span<const double> grad) {
  std::vector<double> out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (std::isnan(grad[i])) throw DivergenceError("lambda gradient is NaN at sample " + std::to_string(i));
    out[i] = std::clamp(grad[i], -1.0, 1.0);
  }
  return out;
}

std::vector<double> perturb_lambda(std::span<const double> lambda, std::span<const double> grad,
                                   double epsilon) {
  if (lambda.size() != grad.size()) {
    throw DimensionError("perturb_lambda: " + std::to_string(lambda.size()) + " coefficients, " +
                         std::to_string(grad.size()) + " gradients");
  }
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    out[i] = std::clamp(lambda[i] + epsilon * grad[i], 0.0, 1.0);
  }
  return out;
}

Var recompute_loss(Model& model, Tape& tape, const RandOpResult& rand,
                   std::span<const double> lambda_prime, const ForwardContext& ctx) {
  const std::size_t n = rand.mix.lambda.size();
  if (lambda_prime.size() != n) {
    throw DimensionError("recompute_loss: " + std::to_string(lambda_prime.size()) +
                         " perturbed coefficients for batch of " + std::to_string(n));
  }
  Var lp = tape.constant(Tensor({n}, std::vector<double>(lambda_prime.begin(), lambda_prime.end())));
  Hidden mixed = mix_hidden(rand.prefix, rand.mix.j_index, lp);
  Var logits = forward_from_layer(model, tape, mixed, ctx);
  return mixup_loss(logits, rand.labels_i, rand.labels_j, rand.mix.lambda);
}

std::vector<double> compute_mask(std::span<const double> loss, std::span<const double> loss_prime) {
  if (loss.size() != loss_prime.size()) {
    throw DimensionError("compute_mask: length mismatch");
  }
  std::vector<double> mask(loss.size());
  for (std::size_t i = 0; i < loss.size(); ++i) mask[i] = loss_prime[i] - loss[i] > 0.0 ? 1.0 : 0.0;
  return mask;
}

Var final_loss(Var loss, Var loss_prime, std::span<const double> mask) {
  const std::size_t n = mask.size();
  if (loss.shape() != Shape{n} || loss_prime.shape() != Shape{n}) {
    throw DimensionError("final_loss: losses " + shape_str(loss.shape()) + ", " +
                         shape_str(loss_prime.shape()) + " with mask of " + std::to_string(n));
  }
  Tape& tape = *loss.tape;
  Tensor keep({n}, std::vector<double>(n));
  Tensor take({n}, std::vector<double>(mask.begin(), mask.end()));
  for (std::size_t i = 0; i < n; ++i) keep[i] = 1.0 - mask[i];
  return ops::add(ops::mul(loss, tape.constant(std::move(keep))),
                  ops::mul(loss_prime, tape.constant(std::move(take))));
}

StepResult amp_step(Model& model, const Batch& batch, const MixConfig& config, StepStreams streams,
                    const StepOptions& options) {
  Tape tape;
  const std::size_t n = batch.size();
  const Tensor drop = sample_dropout_mask(model, n, streams.dropout);
  const ForwardContext ctx{&drop};
  RandOpResult rand = rand_op(model, tape, batch, config, streams.mix, ctx,
                              RandOpOptions{options.forced_lambda});

  // MaxOp: first reverse pass, lambda only.
  std::vector<double> grad = grad_lambda(tape, ops::sum(rand.loss), rand.lambda_leaf);
  if (!config.per_pair_lambda) {
    double total = 0.0;
    for (double g : grad) total += g;
    grad.assign(n, total);
  }
  LossBundle b;
  b.lambda = rand.mix.lambda;
  b.grad_lambda = clip_grad(grad);
  b.lambda_prime_unclamped.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.lambda_prime_unclamped[i] = b.lambda[i] + config.epsilon * b.grad_lambda[i];
  }
  b.lambda_prime = perturb_lambda(b.lambda, b.grad_lambda, config.epsilon);
  Var loss_prime = recompute_loss(model, tape, rand, b.lambda_prime, ctx);

  // MinOp: select the larger loss per sample, second reverse pass for theta.
  b.loss = values_of(rand.loss);
  b.loss_prime = values_of(loss_prime);
  b.delta.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.delta[i] = b.loss_prime[i] - b.loss[i];
  b.mask = options.mask_mode == MaskMode::kCompare ? compute_mask(b.loss, b.loss_prime)
                                                   : std::vector<double>(n, 1.0);
  Var selected = final_loss(rand.loss, loss_prime, b.mask);
  b.loss_final = values_of(selected);
  Var objective = ops::mean(selected);
  tape.backward(objective);
  return StepResult{objective.value()[0], std::move(b)};
}

StepResult mixup_step(Model& model, const Batch& batch, const MixConfig& config,
                      StepStreams streams, const StepOptions& options) {
  Tape tape;
  const Tensor drop = sample_dropout_mask(model, batch.size(), streams.dropout);
  const ForwardContext ctx{&drop};
  RandOpResult rand = rand_op(model, tape, batch, config, streams.mix, ctx,
                              RandOpOptions{options.forced_lambda});
  Var objective = ops::mean(rand.loss);
  tape.backward(objective);
  return StepResult{objective.value()[0], passive_bundle(values_of(rand.loss), rand.mix.lambda)};
}

StepResult plain_step(Model& model, const Batch& batch, StepStreams streams) {
  Tape tape;
  const Tensor drop = sample_dropout_mask(model, batch.size(), streams.dropout);
  Var logits = forward(model, tape, batch, ForwardContext{&drop});
  Var loss = ops::softmax_cross_entropy(logits, batch.labels);
  Var objective = ops::mean(loss);
  tape.backward(objective);
  return StepResult{objective.value()[0],
                    passive_bundle(values_of(loss), std::vector<double>(batch.size(), 1.0))};
}

StepResult training_step(Model& model, const Batch& batch, const MixConfig& config,
                         StepStreams streams, const StepOptions& options) {
  switch (config.policy) {
    case Policy::kNone:
      return plain_step(model, batch, streams);
    case Policy::kMixup:
      return mixup_step(model, batch, config, streams, options);
    case Policy::kAmp:
      return amp_step(model, batch, config, streams, options);
  }
  throw ContractError("unknown policy");
}

}  // namespace amplab
