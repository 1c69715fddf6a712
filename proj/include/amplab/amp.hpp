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

#include <optional>
#include <span>
#include <vector>

#include "amplab/batch.hpp"
#include "amplab/mixup.hpp"
#include "amplab/models.hpp"
#include "amplab/rng.hpp"
#include "amplab/tape.hpp"

namespace amplab {

/// Everything computed during one adversarial mixing step, per sample.
struct LossBundle {
  std::vector<double> loss;                  // L under lambda
  std::vector<double> loss_prime;            // L' (features at lambda', labels at lambda)
  std::vector<double> delta;                 // L' - L
  std::vector<double> mask;                  // 1 where delta > 0
  std::vector<double> loss_final;
  std::vector<double> lambda;
  std::vector<double> grad_lambda;           // clipped to [-1, 1]
  std::vector<double> lambda_prime;          // clamped to [0, 1]
  std::vector<double> lambda_prime_unclamped;
};

/// d(sum L)/d(lambda_s) from one reverse pass. Leaves parameter gradients
/// untouched. Throws ContractError if `lambda_leaf` is not a variable leaf.
std::vector<double> grad_lambda(Tape& tape, Var loss_sum, Var lambda_leaf);

/// Clamps each component to [-1, 1]; NaN raises DivergenceError.
std::vector<double> clip_grad(std::span<const double> grad);

/// clamp(lambda + epsilon * grad, 0, 1).
std::vector<double> perturb_lambda(std::span<const double> lambda, std::span<const double> grad,
                                   double epsilon);

/// Re-mixes the cached prefix activations at lambda' (a constant) and scores
/// them against labels still weighted by the original lambda.
Var recompute_loss(Model& model, Tape& tape, const RandOpResult& rand,
                   std::span<const double> lambda_prime, const ForwardContext& ctx = {});

/// 1 where L' - L > 0, else 0.
std::vector<double> compute_mask(std::span<const double> loss, std::span<const double> loss_prime);

/// L * (1 - mask) + L' * mask, with the mask as a constant selector.
Var final_loss(Var loss, Var loss_prime, std::span<const double> mask);

struct StepStreams {
  Rng& mix;
  Rng& dropout;
};

enum class MaskMode {
  kCompare,          // full AMP
  kAlwaysPerturbed,  // ablation: always train on L'
};

struct StepOptions {
  MaskMode mask_mode = MaskMode::kCompare;
  std::optional<double> forced_lambda;
};

struct StepResult {
  double loss = 0.0;  // scalar objective that was back-propagated
  LossBundle bundle;
};

/// One adversarial mixing step. Accumulates parameter gradients of
/// mean(L_final); the caller zeroes gradients and applies the optimizer.
StepResult amp_step(Model& model, const Batch& batch, const MixConfig& config, StepStreams streams,
                    const StepOptions& options = {});

/// Plain Mixup step; the bundle reports L' = L and an all-zero mask.
StepResult mixup_step(Model& model, const Batch& batch, const MixConfig& config,
                      StepStreams streams, const StepOptions& options = {});

/// Cross-entropy on the unmixed batch.
StepResult plain_step(Model& model, const Batch& batch, StepStreams streams);

/// Dispatches on config.policy.
StepResult training_step(Model& model, const Batch& batch, const MixConfig& config,
                         StepStreams streams, const StepOptions& options = {});

}  // namespace amplab
