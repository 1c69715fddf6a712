/*
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

#include <algorithm>
#include <cmath>
#include <vector>

#include "amplab/config.hpp"
#include "amplab/stats.hpp"
#include "amplab/train.hpp"

namespace amplab {
namespace {

ExperimentConfig acceptance_config() { return load_config(AMPLAB_SOURCE_DIR "/configs/acceptance.cfg"); }

// Mean training objective over the last pass through the training set.
double final_pass_loss(const TrainReport& report, std::size_t train_size, std::size_t batch_size) {
  const std::size_t per_pass = (train_size + batch_size - 1) / batch_size;
  const std::size_t n = std::min(per_pass, report.steps.size());
  double sum = 0.0;
  for (std::size_t k = report.steps.size() - n; k < report.steps.size(); ++k) sum += report.steps[k].objective;
  return sum / static_cast<double>(n);
}

TEST(AcceptanceTask, PlainBaselineBelowFifteenPercent) {
  ExperimentConfig config = acceptance_config();
  config.mix.policy = Policy::kNone;
  const PreparedData data = prepare_data(config);
  const TrainedRun run = train(config, data, config.seeds.front());
  EXPECT_LT(run.report.test_error, 0.15);
}

TEST(AcceptanceTask, StepSizeSpreadBelowSeedSpread) {
  ExperimentConfig config = acceptance_config();
  config.mix.policy = Policy::kAmp;
  const PreparedData data = prepare_data(config);
  const std::vector<double> epsilons{0.0005, 0.002, 0.01};
  std::vector<std::vector<double>> loss(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    config.mix.epsilon = epsilons[e];
    for (const std::uint64_t seed : config.seeds) {
      const TrainedRun run = train(config, data, seed, TrainOptions{.skip_model_selection = true});
      loss[e].push_back(final_pass_loss(run.report, data.train.size(), config.batch_size));
    }
  }
  const double seed_std = stats::sample_std(loss[1]);
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const auto [lo, hi] = std::minmax({loss[0][s], loss[1][s], loss[2][s]});
    EXPECT_LT(hi - lo, seed_std) << "seed " << config.seeds[s];
  }
}

}  // namespace
}  // namespace amplab
