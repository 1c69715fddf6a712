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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amplab/data.hpp"
#include "amplab/mixup.hpp"
#include "amplab/models.hpp"

namespace amplab {

struct ModelConfig {
  Backbone backbone = Backbone::kEmbedMlp;
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 32;
  std::vector<std::size_t> filter_widths{3, 4, 5};
  std::size_t feature_maps = 16;
  double dropout = 0.0;
  bool embed_frozen = false;
  std::string pretrained_embeddings;  // empty: random init
};

struct DataConfig {
  std::string train_path;  // empty: synthetic corpus
  std::string test_path;
  SyntheticSpec synthetic;
  std::size_t synthetic_test_per_class = 100;
  std::uint64_t data_seed = 20210913;
  double subsample_ratio = 1.0;
  double dev_fraction = 0.1;
  std::size_t max_len = 32;
  std::size_t min_freq = 1;
};

/// Everything that determines a training run apart from the seed.
struct ExperimentConfig {
  MixConfig mix;
  ModelConfig model;
  DataConfig data;
  std::size_t batch_size = 50;
  double lr = 2e-4;
  std::size_t max_steps = 8000;
  std::vector<std::uint64_t> seeds{0};
  /// Arms compared by run_seeds / lowres.
  std::vector<Policy> policies{Policy::kNone, Policy::kMixup, Policy::kAmp};
  /// Worker threads for multi-seed runs; 0 means hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

/// Parses flat `key = value` text. '#' starts a comment. Unknown keys and
/// malformed values raise ConfigError naming the line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

/// Every accepted key with a one-line description.
std::vector<std::pair<std::string, std::string>> config_schema();

}  // namespace amplab
