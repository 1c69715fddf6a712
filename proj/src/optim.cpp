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
#include "amplab/optim.hpp"

#include <cmath>

#include "amplab/errors.hpp"

namespace amplab {

AdamState make_adam(const std::vector<Parameter>& params, const AdamHyper& hyper) {
  AdamState state;
  state.hyper = hyper;
  for (const auto& p : params) {
    state.m.emplace_back(p.tensor.numel(), 0.0);
    state.v.emplace_back(p.tensor.numel(), 0.0);
  }
  return state;
}

void adam_update(std::vector<Parameter>& params, AdamState& state) {
  if (state.m.size() != params.size()) {
    throw ContractError("adam_update: state built for " + std::to_string(state.m.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  for (const auto& p : params) {
    if (!p.tensor.requires_grad || !p.tensor.grad) continue;
    for (double g : *p.tensor.grad) {
      if (!std::isfinite(g)) throw DivergenceError("non-finite gradient in " + p.name);
    }
  }
  ++state.t;
  const auto& h = state.hyper;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& t = params[k].tensor;
    if (!t.requires_grad) continue;
    auto& m = state.m[k];
    auto& v = state.v[k];
    const std::vector<double>* g = t.grad ? &*t.grad : nullptr;
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double gi = g ? (*g)[i] : 0.0;
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * gi;
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * gi * gi;
      t.values[i] -= h.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + h.eps);
    }
  }
}

}  // namespace amplab
