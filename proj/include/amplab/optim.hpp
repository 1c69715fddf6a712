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
#include <vector>

#include "amplab/models.hpp"

namespace amplab {

struct AdamHyper {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments per parameter, plus the step count.
struct AdamState {
  AdamHyper hyper;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::size_t t = 0;
};

AdamState make_adam(const std::vector<Parameter>& params, const AdamHyper& hyper);

/// One bias-corrected Adam update from each parameter's accumulated grad.
/// Parameters without requires_grad are skipped; a missing grad counts as
/// zero. A non-finite gradient raises DivergenceError naming the parameter,
/// before any parameter is modified.
void adam_update(std::vector<Parameter>& params, AdamState& state);

}  // namespace amplab
