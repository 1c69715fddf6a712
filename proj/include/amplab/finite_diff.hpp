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

#include <functional>
#include <vector>

#include "amplab/tape.hpp"
#include "amplab/tensor.hpp"

namespace amplab {

/// Builds a scalar-valued graph of `x` on the given tape.
using ScalarGraph = std::function<Var(Tape& tape, Var x)>;

struct FiniteDiffResult {
  double max_rel_error = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

/// Compares the tape gradient of f at x with central differences of step h.
/// Error per coordinate is |numeric - analytic| / (|analytic| + 1e-8).
/// `prepare` runs on the analytic tape before f is recorded (test hooks).
FiniteDiffResult finite_diff_report(const ScalarGraph& f, const Tensor& x, double h,
                                    const std::function<void(Tape&)>& prepare = {});

double finite_diff_check(const ScalarGraph& f, const Tensor& x, double h);

/// Relative error used by every gradient check in the project.
double relative_error(double numeric, double analytic);

}  // namespace amplab
