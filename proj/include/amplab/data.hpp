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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amplab/batch.hpp"
#include "amplab/rng.hpp"
#include "amplab/vocab.hpp"

namespace amplab {

struct Example {
  std::string text;
  int label = 0;

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::string name;
  std::size_t num_classes = 0;
  std::vector<Example> examples;
  /// label_names[id] is the label as written in the corpus file.
  std::vector<std::string> label_names;

  std::size_t size() const { return examples.size(); }
  std::vector<std::size_t> class_counts() const;
};

/// Reads `<label>\t<text>` lines. Labels that are all integers map to ids in
/// ascending numeric order; otherwise ids follow first appearance. Blank lines
/// are skipped.
Dataset load_corpus(const std::filesystem::path& path);
/// Reads a corpus against an existing label map (e.g. a test split).
Dataset load_corpus(const std::filesystem::path& path, const std::vector<std::string>& label_names);

/// Lowercase, whitespace split.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens with at least `min_freq` occurrences, ids in first-occurrence order.
Vocab build_vocab(const Dataset& train, std::size_t min_freq);

/// Truncates or pads every text to `max_len`. Empty texts become one UNK.
Batch encode_batch(std::span<const Example> examples, const Vocab& vocab, std::size_t max_len,
                   std::size_t num_classes);

/// Rows `index` of an encoded batch, in that order.
Batch gather_batch(const Batch& all, std::span<const std::size_t> index);

/// Tokens of row `row` up to its valid length.
std::vector<std::string> decode_row(const Batch& batch, std::size_t row, const Vocab& vocab);

/// Keeps max(1, floor(ratio * n_c)) examples of every class, sampled without
/// replacement. Original order is preserved among kept examples.
Dataset subsample_per_class(const Dataset& data, double ratio, Rng& rng);

/// Stratified split. Each class with n_c >= 2 sends ceil(fraction * n_c)
/// examples (at most n_c - 1) to dev; singleton classes stay in train.
std::pair<Dataset, Dataset> split_dev(const Dataset& data, double fraction, Rng& rng);

struct SyntheticSpec {
  std::size_t num_classes = 6;
  std::size_t per_class = 100;
  std::size_t vocab_size = 500;
  std::size_t signal_tokens_per_class = 10;
  std::size_t noise_len = 20;
  double label_noise = 0.1;
};

/// Each class owns a disjoint block of signal tokens. An example holds 2-4
/// signal tokens of its class shuffled among `noise_len` shared noise tokens;
/// a `label_noise` fraction has one signal token swapped for another class's.
Dataset generate_synthetic_corpus(const SyntheticSpec& spec, Rng& rng);

/// FNV-1a over labels and texts.
std::uint64_t dataset_hash(const Dataset& data);

}  // namespace amplab
