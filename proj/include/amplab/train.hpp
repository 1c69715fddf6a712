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
#include <vector>

#include "amplab/amp.hpp"
#include "amplab/config.hpp"
#include "amplab/data.hpp"
#include "amplab/models.hpp"
#include "amplab/vocab.hpp"

namespace amplab {

/// Train / dev / test splits with the vocabulary built on train.
struct PreparedData {
  Dataset train;
  Dataset dev;
  Dataset test;
  Vocab vocab;
  std::uint64_t train_hash = 0;
  std::uint64_t test_hash = 0;
};

/// Loads or generates the corpus, subsamples and splits it. Everything is
/// drawn from data_seed, so all arms and seeds see the same examples.
PreparedData prepare_data(const ExperimentConfig& config);

/// Fresh backbone for `config.model`; optional pretrained embeddings.
Model build_model(const ExperimentConfig& config, const PreparedData& data, Rng& init);

/// Per-step training signals.
struct StepRecord {
  double objective = 0.0;
  double mean_loss = 0.0;
  double mean_loss_prime = 0.0;
  double mask_rate = 0.0;
  double mean_abs_grad_lambda = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  Policy policy = Policy::kNone;
  std::vector<StepRecord> steps;
  std::vector<double> dev_errors;  // one per evaluation point
  std::size_t best_step = 0;
  double best_dev_error = 1.0;
  double test_error = 1.0;
  double wall_seconds = 0.0;
};

struct TrainOptions {
  MaskMode mask_mode = MaskMode::kCompare;
  /// Called after every step with the step index and its result.
  std::function<void(std::size_t, const Batch&, const StepResult&)> on_step;
  /// Skip the per-epoch dev evaluation and keep the final model.
  bool skip_model_selection = false;
};

struct TrainedRun {
  Model model;  // best-dev checkpoint
  TrainReport report;
};

/// Trains one model. The seed splits into independent streams for init,
/// shuffling, mixing and dropout.
TrainedRun train(const ExperimentConfig& config, const PreparedData& data, std::uint64_t seed,
                 const TrainOptions& options = {});

/// Index of the largest logit; ties go to the lowest class.
std::vector<int> predict(const Model& model, const Batch& batch);

/// Fraction of misclassified examples.
double evaluate(const Model& model, const Dataset& data, const Vocab& vocab, std::size_t max_len);

}  // namespace amplab
