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
#include <functional>
#include <string>
#include <vector>

#include "amplab/batch.hpp"
#include "amplab/models.hpp"
#include "amplab/rng.hpp"

namespace amplab {

struct GradcheckEntry {
  std::string name;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct GradcheckOptions {
  std::uint64_t seed = 7;
  double h = 1e-5;
  double tolerance = 1e-4;
  /// Op whose backward rule is negated on every analytic tape (test hook).
  std::string inject_sign_flip;
};

/// Central-difference check of every op and of both backbones' parameters.
std::vector<GradcheckEntry> run_gradcheck(const GradcheckOptions& options = {});

/// Random padded batch with lengths in [min_len, max_len] and one-hot labels.
Batch random_batch(std::size_t n, std::size_t max_len, std::size_t vocab_size,
                   std::size_t num_classes, Rng& rng, std::size_t min_len = 1);

/// Loss of a model on a fixed batch, recorded on `tape`.
using ModelLoss = std::function<Var(Model& model, Tape& tape)>;

/// Compares the accumulated parameter gradients of `loss` with central
/// differences, one entry per parameter tensor.
std::vector<GradcheckEntry> check_model_gradients(Model& model, const ModelLoss& loss, double h,
                                                  double tolerance,
                                                  const std::string& inject_sign_flip = {});

struct LambdaOracleOptions {
  std::uint64_t seed = 11;
  std::size_t instances = 100;
  double h = 1e-6;
};

struct LambdaOracleResult {
  std::size_t instances = 0;
  std::size_t coordinates = 0;
  /// Tape gradient against central differences of the per-sample loss.
  double max_fd_error = 0.0;
  /// Tape gradient against l_i - l_j + dL/dg_mixed . (g_i - g_j).
  double max_decomposition_error = 0.0;
};

/// d L / d lambda on random (backbone, layer, batch, lambda) instances.
/// Pairings have no fixed points: a self-pair has an exactly zero gradient,
/// where the relative error only measures rounding noise.
LambdaOracleResult lambda_gradient_oracle(const LambdaOracleOptions& options = {});

}  // namespace amplab
