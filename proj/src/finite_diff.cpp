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
#include "amplab/finite_diff.hpp"

#include <algorithm>
#include <cmath>

namespace amplab {

double relative_error(double numeric, double analytic) {
  return std::abs(numeric - analytic) / (std::abs(analytic) + 1e-8);
}

FiniteDiffResult finite_diff_report(const ScalarGraph& f, const Tensor& x, double h,
                                    const std::function<void(Tape&)>& prepare) {
  FiniteDiffResult result;
  {
    Tape tape;
    if (prepare) prepare(tape);
    Var xv = tape.variable(x);
    Var root = f(tape, xv);
    const Var wrt[1] = {xv};
    result.analytic = tape.gradients(root, wrt)[0];
  }
  auto eval = [&](const Tensor& point) {
    Tape tape(GradMode::kDisabled);
    Var xv = tape.constant(point);
    return f(tape, xv).value().values.at(0);
  };
  result.numeric.resize(x.numel());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = eval(probe);
    probe[i] = orig - h;
    const double down = eval(probe);
    probe[i] = orig;
    result.numeric[i] = (up - down) / (2.0 * h);
    result.max_rel_error =
        std::max(result.max_rel_error, relative_error(result.numeric[i], result.analytic[i]));
  }
  return result;
}

double finite_diff_check(const ScalarGraph& f, const Tensor& x, double h) {
  return finite_diff_report(f, x, h).max_rel_error;
}

}  // namespace amplab
