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
#include <gtest/gtest.h>

#include <cmath>

#include "amplab/errors.hpp"
#include "amplab/finite_diff.hpp"
#include "amplab/gradcheck.hpp"
#include "amplab/ops.hpp"
#include "amplab/rng.hpp"
#include "amplab/tape.hpp"

namespace amplab {
namespace {

TEST(Tensor, RejectsMismatchedSize) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5, 0.0)), DimensionError);
  EXPECT_EQ(shape_str({2, 3}), "[2x3]");
  EXPECT_EQ(Tensor::scalar(4.0).numel(), 1u);
}

TEST(Tensor, AccumulateGradAddsUp) {
  Tensor t = Tensor::zeros({2}, true);
  const std::vector<double> g{1.0, 2.0};
  t.accumulate_grad(g);
  t.accumulate_grad(g);
  EXPECT_EQ(*t.grad, (std::vector<double>{2.0, 4.0}));
  t.zero_grad();
  EXPECT_FALSE(t.grad.has_value() && (*t.grad)[0] != 0.0);
}

TEST(Tape, ProductRuleOnScalars) {
  Tensor a = Tensor::scalar(3.0);
  Tensor b = Tensor::scalar(-2.0);
  a.requires_grad = b.requires_grad = true;
  Tape tape;
  const Var va = tape.leaf(a);
  const Var vb = tape.leaf(b);
  tape.backward(ops::sum(ops::mul(va, vb)));
  EXPECT_DOUBLE_EQ((*a.grad)[0], -2.0);
  EXPECT_DOUBLE_EQ((*b.grad)[0], 3.0);
}

TEST(Tape, GradientsLeaveAccumulatorsUntouched) {
  Tensor a = Tensor::scalar(3.0);
  a.requires_grad = true;
  Tape tape;
  const Var va = tape.leaf(a);
  const Var y = ops::sum(ops::mul(va, va));
  const Var wrt[1] = {va};
  const auto g = tape.gradients(y, wrt);
  EXPECT_DOUBLE_EQ(g[0][0], 6.0);
  EXPECT_FALSE(a.grad.has_value());
}

TEST(Tape, ReusedNodeAccumulatesBothPaths) {
  Tape tape;
  const Var x = tape.variable(Tensor({2}, {1.0, 2.0}));
  const Var y = ops::add(ops::scale(x, 2.0), ops::scale(x, 3.0));
  const Var wrt[1] = {x};
  const auto g = tape.gradients(ops::sum(y), wrt);
  EXPECT_EQ(g[0], (std::vector<double>{5.0, 5.0}));
}

TEST(Tape, NonScalarRootIsAContractError) {
  Tape tape;
  const Var x = tape.variable(Tensor({2}, {1.0, 2.0}));
  EXPECT_THROW(tape.backward(x), ContractError);
}

TEST(Tape, ConstantsReceiveNoGradient) {
  Tape tape;
  const Var c = tape.constant(Tensor({2}, {1.0, 2.0}));
  const Var x = tape.variable(Tensor({2}, {3.0, 4.0}));
  const Var y = ops::sum(ops::mul(c, x));
  EXPECT_FALSE(tape.requires_grad(c));
  const Var wrt[2] = {c, x};
  const auto g = tape.gradients(y, wrt);
  EXPECT_EQ(g[0], (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(g[1], (std::vector<double>{1.0, 2.0}));
}

TEST(Tape, DisabledModeRecordsNoGradients) {
  Tensor w = Tensor::scalar(2.0);
  w.requires_grad = true;
  Tape tape(GradMode::kDisabled);
  const Var v = tape.leaf(w);
  EXPECT_FALSE(tape.requires_grad(v));
  EXPECT_DOUBLE_EQ(ops::sum(ops::scale(v, 3.0)).value()[0], 6.0);
}

TEST(Tape, ReversePassVisitsEachNodeOnce) {
  Tape tape;
  const Var x = tape.variable(Tensor({3}, {1.0, 2.0, 3.0}));
  const Var y = ops::sum(ops::tanh(x));
  tape.backward(y);
  EXPECT_EQ(tape.last_backward_visits(), tape.size());
}

TEST(Tape, SignFlipHookNegatesOneOp) {
  auto f = [](Tape&, Var x) { return ops::sum(ops::tanh(x)); };
  const Tensor x({2}, {0.3, -0.4});
  const auto report = finite_diff_report(f, x, 1e-5, [](Tape& t) { t.inject_sign_flip("tanh"); });
  EXPECT_NEAR(report.max_rel_error, 2.0, 1e-6);
}

TEST(Ops, MatmulValues) {
  Tape tape;
  const Var a = tape.constant(Tensor({2, 2}, {1, 2, 3, 4}));
  const Var b = tape.constant(Tensor({2, 1}, {5, 6}));
  EXPECT_EQ(ops::matmul(a, b).value().values, (std::vector<double>{17, 39}));
  EXPECT_THROW(ops::matmul(b, b), DimensionError);
}

TEST(Ops, EmbeddingLookupRejectsOutOfRangeIds) {
  Tape tape;
  const Var t = tape.constant(Tensor::zeros({3, 2}));
  const std::vector<int> ids{0, 3};
  EXPECT_THROW(ops::embedding_lookup(t, ids), IndexError);
}

TEST(Ops, MeanPoolIgnoresPadding) {
  Tape tape;
  const Var x = tape.constant(Tensor({3, 1}, {2.0, 4.0, 100.0}));
  EXPECT_DOUBLE_EQ(ops::mean_pool(x, 2).value()[0], 3.0);
}

TEST(Ops, ConvRejectsShortInput) {
  Tape tape;
  const Var x = tape.constant(Tensor::zeros({2, 3}));
  const Var f = tape.constant(Tensor::zeros({3, 3, 2}));
  const Var b = tape.constant(Tensor::zeros({2}));
  EXPECT_THROW(ops::conv1d_maxpool(x, f, b), InputTooShortError);
}

TEST(Ops, ConvMaxTieGoesToFirstPosition) {
  Tape tape;
  // Identical windows at t = 0 and t = 1.
  const Var x = tape.variable(Tensor({3, 1}, {1.0, 1.0, 1.0}));
  const Var f = tape.constant(Tensor({2, 1, 1}, {1.0, 1.0}));
  const Var b = tape.constant(Tensor::zeros({1}));
  const Var y = ops::sum(ops::conv1d_maxpool(x, f, b));
  EXPECT_DOUBLE_EQ(y.value()[0], 2.0);
  const Var wrt[1] = {x};
  EXPECT_EQ(tape.gradients(y, wrt)[0], (std::vector<double>{1.0, 1.0, 0.0}));
}

TEST(Ops, CrossEntropyIsStableForLargeLogits) {
  Tape tape;
  const Var z = tape.constant(Tensor({1, 2}, {1000.0, 0.0}));
  const Tensor target({1, 2}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(ops::softmax_cross_entropy(z, target).value()[0], 1000.0);
}

TEST(Ops, CrossEntropyOfUniformLogitsIsLogC) {
  Tape tape;
  const Var z = tape.constant(Tensor::zeros({1, 4}));
  const Tensor target({1, 4}, {0.0, 0.0, 1.0, 0.0});
  EXPECT_NEAR(ops::softmax_cross_entropy(z, target).value()[0], std::log(4.0), 1e-15);
}

TEST(Ops, CrossEntropyNeedsTwoClasses) {
  Tape tape;
  const Var z = tape.constant(Tensor::zeros({1, 1}));
  EXPECT_THROW(ops::softmax_cross_entropy(z, Tensor({1, 1}, {1.0})), ConfigError);
}

TEST(FiniteDiff, RelativeErrorDefinition) {
  EXPECT_DOUBLE_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(relative_error(1.1, 1.0), 0.1, 1e-7);
}

TEST(FiniteDiff, EveryOpAndModelPassesGradcheck) {
  for (const auto& e : run_gradcheck()) {
    EXPECT_TRUE(e.passed) << e.name << " rel err " << e.max_rel_error;
  }
}

TEST(FiniteDiff, InjectedSignErrorIsReportedByOpName) {
  GradcheckOptions options;
  options.inject_sign_flip = "matmul";
  bool matmul_failed = false;
  for (const auto& e : run_gradcheck(options)) {
    if (e.name.rfind("matmul", 0) == 0) matmul_failed = matmul_failed || !e.passed;
    if (e.name == "tanh" || e.name == "relu") EXPECT_TRUE(e.passed) << e.name;
  }
  EXPECT_TRUE(matmul_failed);
}

}  // namespace
}  // namespace amplab
