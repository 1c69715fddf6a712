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
#include <optional>
#include <string>
#include <vector>

#include "amplab/config.hpp"
#include "amplab/train.hpp"

namespace amplab {

/// One column of a comparison: a policy plus the mask behaviour.
struct Arm {
  std::string label;
  Policy policy = Policy::kNone;
  MaskMode mask_mode = MaskMode::kCompare;
  std::string reference;  // arm the relative improvement is measured against
};

struct RunRow {
  std::string arm;
  std::uint64_t seed = 0;
  double test_error = 0.0;
  double wall_seconds = 0.0;
};

struct SummaryRow {
  std::string arm;
  std::size_t runs = 0;
  double mean = 0.0;
  double std = 0.0;
  std::optional<double> rp_percent;
};

struct ExperimentTable {
  std::vector<RunRow> runs;
  std::vector<SummaryRow> summary;

  /// Test errors of one arm in seed order.
  std::vector<double> errors(const std::string& arm) const;
};

/// "none", "mixup", "amp" arms; mixup is measured against none and amp
/// against mixup (or none when mixup is absent).
std::vector<Arm> policy_arms(const std::vector<Policy>& policies);

/// baseline, +randop, +maxop (always trains on the perturbed loss), amp.
std::vector<Arm> ablation_arms();

using RunCallback = std::function<void(const RunRow&)>;

/// Trains every (arm, seed) pair on `config.threads` workers. Results are
/// independent of the thread count.
ExperimentTable run_arms(const ExperimentConfig& config, const PreparedData& data,
                         const std::vector<Arm>& arms, const RunCallback& on_run = {});

ExperimentTable summarize(const std::vector<RunRow>& runs, const std::vector<Arm>& arms);

ExperimentTable run_seeds(const ExperimentConfig& config, const RunCallback& on_run = {});
ExperimentTable ablate(const ExperimentConfig& config, const RunCallback& on_run = {});

struct LowResRow {
  double ratio = 1.0;
  std::size_t train_size = 0;
  ExperimentTable table;
};

/// run_seeds at each subsample ratio.
std::vector<LowResRow> lowres(const ExperimentConfig& config, const std::vector<double>& ratios,
                              const RunCallback& on_run = {});

/// `policy,seed,test_error`
std::string runs_csv(const ExperimentTable& table);
/// `policy,mean,std,rp_percent` with errors in percent, rp blank when undefined.
std::string summary_csv(const ExperimentTable& table);
/// `ratio,train_size,policy,mean,std,rp_percent`
std::string lowres_csv(const std::vector<LowResRow>& rows);

}  // namespace amplab
