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

#include "amplab/config.hpp"
#include "amplab/errors.hpp"
#include "amplab/experiments.hpp"
#include "amplab/ops.hpp"
#include "amplab/optim.hpp"
#include "amplab/stats.hpp"
#include "amplab/sweep.hpp"
#include "amplab/train.hpp"

namespace amplab {
namespace {

ExperimentConfig tiny_config() {
  return parse_config(R"(
    # small and fast
    embed_dim = 8
    hidden_dim = 8
    batch_size = 16
    max_steps = 60
    lr = 3e-3
    synthetic_per_class = 30
    synthetic_test_per_class = 20
    synthetic_noise_len = 6
    max_len = 12
    seeds = 0,1
    threads = 1
  )");
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config("policy = amp\nepsilon = 0.01  # step\nseeds = 0..2, 7\n");
  EXPECT_EQ(c.mix.policy, Policy::kAmp);
  EXPECT_DOUBLE_EQ(c.mix.epsilon, 0.01);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2, 7}));
  EXPECT_DOUBLE_EQ(c.lr, 2e-4);
  EXPECT_EQ(c.max_steps, 8000u);
  EXPECT_EQ(c.batch_size, 50u);
  EXPECT_DOUBLE_EQ(c.mix.alpha, 1.0);
}

TEST(Config, RejectsUnknownKeysWithLineNumber) {
  try {
    parse_config("alpha = 1\nlearning_rate = 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
  EXPECT_THROW(parse_config("alpha 1\n"), ConfigError);
  EXPECT_THROW(parse_config("alpha = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("batch_size = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("max_steps = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("seeds = \n"), ConfigError);
  EXPECT_THROW(parse_config("alpha = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("mix_layer = pooled\n"), ConfigError);
  EXPECT_THROW(parse_config("policy = cutmix\n"), ConfigError);
  EXPECT_THROW(parse_config("train_path = a.tsv\n"), ConfigError);
}

TEST(Config, TextFormRoundTrips) {
  const auto c = parse_config("policy = amp\nfilter_widths = 2,4\nbackbone = text-cnn\nmax_len = 9\nlr = 0.0031\n");
  const auto again = parse_config(to_text(c));
  EXPECT_EQ(to_text(again), to_text(c));
  EXPECT_EQ(again.model.filter_widths, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(config_schema().size(), 33u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<Parameter> params{{"w", Tensor({1}, {0.0}, true)}};
  AdamState state = make_adam(params, {});
  params[0].tensor.accumulate_grad(std::vector<double>{1.0});
  adam_update(params, state);
  EXPECT_NEAR(params[0].tensor[0], -2e-4 / (1.0 + 1e-8), 1e-18);
  EXPECT_EQ(state.t, 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  std::vector<Parameter> params{{"w", Tensor({2}, {0.5, -0.5}, true)}};
  AdamState state = make_adam(params, {});
  params[0].tensor.accumulate_grad(std::vector<double>{0.0, 0.0});
  adam_update(params, state);
  EXPECT_EQ(params[0].tensor.values, (std::vector<double>{0.5, -0.5}));
}

TEST(Adam, NonFiniteGradientIsADivergence) {
  std::vector<Parameter> params{{"w", Tensor({1}, {0.5}, true)}};
  AdamState state = make_adam(params, {});
  params[0].tensor.accumulate_grad(std::vector<double>{INFINITY});
  EXPECT_THROW(adam_update(params, state), DivergenceError);
  EXPECT_EQ(params[0].tensor[0], 0.5);
}

TEST(Stats, RelativeImprovementMatchesPublishedRounding) {
  EXPECT_DOUBLE_EQ(stats::round_to(stats::relative_improvement(51.0, 42.1), 1), 17.5);
  EXPECT_EQ(stats::relative_improvement(12.5, 12.5), 0.0);
  EXPECT_THROW(stats::relative_improvement(0.0, 1.0), ConfigError);
}

TEST(Stats, MeanAndSampleStd) {
  const std::vector<double> c{3.0, 3.0, 3.0};
  EXPECT_EQ(stats::sample_std(c), 0.0);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
  EXPECT_NEAR(stats::sample_std(x), std::sqrt(5.0 / 3.0), 1e-15);
}

TEST(Stats, WilcoxonExactTail) {
  const std::vector<double> all_pos{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(stats::wilcoxon_signed_rank_greater(all_pos).p_value, 1.0 / 32.0);
  const std::vector<double> mixed{1, 2, 3, -4, 5, 0};
  const auto r = stats::wilcoxon_signed_rank_greater(mixed);
  EXPECT_EQ(r.n_used, 5u);
  EXPECT_DOUBLE_EQ(r.w_plus, 11.0);
  EXPECT_DOUBLE_EQ(r.p_value, 7.0 / 32.0);
  const std::vector<double> zeros{0, 0};
  EXPECT_EQ(stats::wilcoxon_signed_rank_greater(zeros).p_value, 1.0);
}

TEST(Stats, WilcoxonTiedMagnitudesUseAverageRanks) {
  const std::vector<double> d{1, -1, 2};
  const auto r = stats::wilcoxon_signed_rank_greater(d);
  EXPECT_DOUBLE_EQ(r.w_plus, 1.5 + 3.0);
  // Sign patterns with W+ >= 4.5: {1.5,3}, {1.5,1.5,3}, both 1.5-orderings.
  EXPECT_DOUBLE_EQ(r.p_value, 3.0 / 8.0);
}

TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(stats::kolmogorov_p_value(1.358 / (100.0 + 0.12 + 0.0011), 10000), 0.05, 1e-3);
  EXPECT_EQ(stats::kolmogorov_p_value(0.0, 100), 1.0);
}

TEST(Stats, BetaCdf) {
  EXPECT_NEAR(stats::beta_cdf(0.3, 1.0, 1.0), 0.3, 1e-12);
  EXPECT_NEAR(stats::beta_cdf(0.5, 0.2, 0.2), 0.5, 1e-12);
  EXPECT_NEAR(stats::beta_cdf(0.25, 2.0, 2.0), 0.15625, 1e-12);
}

TEST(Evaluate, TiesGoToLowestClass) {
  Rng rng(1);
  Model m = init_embed_mlp(10, 4, 4, 2, rng);
  for (double& v : m.param("output.weight").values) v = 0.0;
  Dataset d;
  d.num_classes = 2;
  d.examples = {{"a", 0}, {"b", 1}, {"c", 0}, {"d", 1}};
  Vocab v;
  for (auto t : {"a", "b", "c", "d"}) v.add(t);
  EXPECT_DOUBLE_EQ(evaluate(m, d, v, 4), 0.5);
  Dataset empty;
  empty.num_classes = 2;
  EXPECT_THROW(evaluate(m, empty, v, 4), ConfigError);
}

TEST(Evaluate, InvariantUnderExampleOrder) {
  const auto config = tiny_config();
  const auto data = prepare_data(config);
  Rng init(3);
  const Model m = build_model(config, data, init);
  Dataset reversed = data.test;
  std::reverse(reversed.examples.begin(), reversed.examples.end());
  EXPECT_EQ(evaluate(m, data.test, data.vocab, 12), evaluate(m, reversed, data.vocab, 12));
}

TEST(Train, SameSeedSameReport) {
  auto config = tiny_config();
  config.mix.policy = Policy::kAmp;
  const auto data = prepare_data(config);
  const auto a = train(config, data, 5);
  const auto b = train(config, data, 5);
  ASSERT_EQ(a.report.steps.size(), 60u);
  for (std::size_t k = 0; k < a.report.steps.size(); ++k) {
    EXPECT_EQ(a.report.steps[k].objective, b.report.steps[k].objective);
  }
  EXPECT_EQ(a.report.dev_errors, b.report.dev_errors);
  EXPECT_EQ(a.report.test_error, b.report.test_error);
  for (std::size_t k = 0; k < a.model.parameters().size(); ++k) {
    EXPECT_EQ(a.model.parameters()[k].tensor.values, b.model.parameters()[k].tensor.values);
  }
}

TEST(Train, PoliciesDifferFromTheFirstStep) {
  auto config = tiny_config();
  const auto data = prepare_data(config);
  config.mix.policy = Policy::kNone;
  const auto plain = train(config, data, 1);
  config.mix.policy = Policy::kMixup;
  const auto mixed = train(config, data, 1);
  EXPECT_NE(plain.report.steps[0].objective, mixed.report.steps[0].objective);
}

TEST(Train, ReportFieldsStayInRange) {
  auto config = tiny_config();
  config.mix.policy = Policy::kAmp;
  const auto data = prepare_data(config);
  const auto run = train(config, data, 2);
  for (const auto& s : run.report.steps) {
    EXPECT_GE(s.mask_rate, 0.0);
    EXPECT_LE(s.mask_rate, 1.0);
  }
  EXPECT_EQ(run.report.dev_errors.size(), 60u * 16 / data.train.size() + 1);
  for (double e : run.report.dev_errors) EXPECT_TRUE(e >= 0.0 && e <= 1.0);
  EXPECT_TRUE(run.report.test_error >= 0.0 && run.report.test_error <= 1.0);
  EXPECT_EQ(*std::min_element(run.report.dev_errors.begin(), run.report.dev_errors.end()),
            run.report.best_dev_error);
}

TEST(Train, PreparedDataIsDeterministicAndDisjoint) {
  const auto config = tiny_config();
  const auto a = prepare_data(config);
  const auto b = prepare_data(config);
  EXPECT_EQ(a.train_hash, b.train_hash);
  EXPECT_EQ(a.train.size() + a.dev.size(), 180u);
  EXPECT_EQ(a.dev.class_counts(), std::vector<std::size_t>(6, 3));
}

TEST(Experiments, IdenticalArmsGiveZeroImprovement) {
  const auto config = tiny_config();
  const auto data = prepare_data(config);
  std::vector<Arm> arms{{"a", Policy::kMixup, MaskMode::kCompare, ""}, {"b", Policy::kMixup, MaskMode::kCompare, "a"}};
  const auto table = run_arms(config, data, arms);
  ASSERT_EQ(table.summary.size(), 2u);
  EXPECT_EQ(*table.summary[1].rp_percent, 0.0);
  EXPECT_FALSE(table.summary[0].rp_percent.has_value());
  EXPECT_EQ(table.errors("a"), table.errors("b"));
}

TEST(Experiments, ThreadCountDoesNotChangeResults) {
  auto config = tiny_config();
  const auto data = prepare_data(config);
  const auto one = run_arms(config, data, policy_arms({Policy::kNone, Policy::kAmp}));
  config.threads = 3;
  const auto three = run_arms(config, data, policy_arms({Policy::kNone, Policy::kAmp}));
  EXPECT_EQ(runs_csv(one), runs_csv(three));
}

TEST(Experiments, CsvHeadersAndArms) {
  ExperimentTable t = summarize({{"none", 0, 0.51, 0.0}, {"amp", 0, 0.421, 0.0}},
                                policy_arms({Policy::kNone, Policy::kAmp}));
  EXPECT_EQ(runs_csv(t), "policy,seed,test_error\nnone,0,0.510000\namp,0,0.421000\n");
  EXPECT_EQ(summary_csv(t), "policy,mean,std,rp_percent\nnone,51.00,0.00,\namp,42.10,0.00,17.5\n");
  EXPECT_EQ(ablation_arms().size(), 4u);
  EXPECT_EQ(ablation_arms()[2].mask_mode, MaskMode::kAlwaysPerturbed);
}

struct SweepFixture : ::testing::Test {
  ExperimentConfig config = tiny_config();
  PreparedData data = prepare_data(config);
  Model a = [this] {
    Rng r(1);
    return build_model(config, data, r);
  }();
  Model b = [this] {
    Rng r(2);
    return build_model(config, data, r);
  }();
};

TEST_F(SweepFixture, SymmetricWithPlainLossEndpoints) {
  SweepOptions options;
  options.max_len = 12;
  const auto rows = lambda_sweep(a, b, data.test, data.vocab, options);
  ASSERT_EQ(rows.size(), 101u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_NEAR(rows[k].loss_a, rows[100 - k].loss_a, 1e-9);
    EXPECT_NEAR(rows[k].loss_b, rows[100 - k].loss_b, 1e-9);
  }
  const Batch all = encode_batch(data.test.examples, data.vocab, 12, data.test.num_classes);
  Tape tape(GradMode::kDisabled);
  const double plain = ops::mean(ops::softmax_cross_entropy(forward(a, tape, all), all.labels)).value()[0];
  EXPECT_NEAR(rows.front().loss_a, plain, 1e-12);
  EXPECT_NEAR(rows.back().loss_a, plain, 1e-12);
  EXPECT_EQ(sweep_csv(rows).substr(0, 33), "lambda,loss_model_a,loss_model_b\n");
  EXPECT_NE(sweep_svg(rows, "mixup", "amp").find("<svg"), std::string::npos);
}

TEST_F(SweepFixture, SinglePairEndpointIsThatExamplesLoss) {
  SweepOptions options;
  options.max_len = 12;
  options.grid_points = 11;
  options.single_pair = std::make_pair(std::size_t{3}, std::size_t{8});
  const auto rows = lambda_sweep(a, b, data.test, data.vocab, options);
  const std::vector<Example> one{data.test.examples[3]};
  const Batch batch = encode_batch(one, data.vocab, 12, data.test.num_classes);
  Tape tape(GradMode::kDisabled);
  const double ce = ops::softmax_cross_entropy(forward(a, tape, batch), batch.labels).value()[0];
  EXPECT_NEAR(rows.back().loss_a, ce, 1e-12);
}

TEST_F(SweepFixture, RejectsForeignVocabulary) {
  Rng r(3);
  Model other = init_embed_mlp(data.vocab.size() + 5, 8, 8, 6, r);
  EXPECT_THROW(lambda_sweep(a, other, data.test, data.vocab, {}), ConfigError);
}

}  // namespace
}  // namespace amplab
