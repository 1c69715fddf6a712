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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "amplab/batch.hpp"
#include "amplab/rng.hpp"
#include "amplab/tape.hpp"
#include "amplab/tensor.hpp"
#include "amplab/vocab.hpp"

namespace amplab {

enum class Backbone { kEmbedMlp, kTextCnn };

std::string_view to_string(Backbone kind);
Backbone parse_backbone(std::string_view name);

inline constexpr std::string_view kWordLayer = "word";
inline constexpr std::string_view kSentLayer = "sent";

struct Parameter {
  std::string name;
  Tensor tensor;
};

/// Text classifier split as f(x) = f_k(g_k(x)) at a named layer k. Both
/// backbones expose "word" (post-embedding grid) and "sent" (final hidden
/// state before the classifier).
class Model {
 public:
  Backbone kind() const { return kind_; }
  const std::vector<std::string>& layer_names() const { return layer_names_; }
  bool has_layer(std::string_view layer) const;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  Tensor& param(std::string_view name);
  const Tensor& param(std::string_view name) const;
  std::size_t parameter_count() const;

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t embed_dim() const { return embed_dim_; }
  /// Width of the "sent" layer (hidden size, or maps * widths for the CNN).
  std::size_t sent_dim() const { return sent_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  /// Shortest padded length the backbone accepts.
  std::size_t min_len() const { return min_len_; }
  const std::vector<std::size_t>& filter_widths() const { return filter_widths_; }
  double dropout() const { return dropout_; }

  bool embed_frozen() const { return embed_frozen_; }
  void set_embed_frozen(bool frozen);
  /// Replaces the embedding table; shape must be [vocab x embed_dim].
  void set_embedding(const Tensor& table);

  void zero_grad();

 private:
  friend Model init_embed_mlp(std::size_t, std::size_t, std::size_t, std::size_t, Rng&, double);
  friend Model init_text_cnn(std::size_t, std::size_t, const std::vector<std::size_t>&,
                             std::size_t, std::size_t, std::size_t, double, Rng&);

  Tensor& add_param(std::string name, Shape shape);

  Backbone kind_ = Backbone::kEmbedMlp;
  std::vector<std::string> layer_names_;
  std::vector<Parameter> params_;
  std::size_t vocab_size_ = 0;
  std::size_t embed_dim_ = 0;
  std::size_t sent_dim_ = 0;
  std::size_t num_classes_ = 0;
  std::size_t min_len_ = 1;
  std::vector<std::size_t> filter_widths_;
  double dropout_ = 0.0;
  bool embed_frozen_ = false;
};

/// embedding -> mean pool -> dense + tanh ("sent") -> dense logits.
Model init_embed_mlp(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden_dim,
                     std::size_t num_classes, Rng& rng, double dropout = 0.0);

/// embedding -> conv1d_maxpool per filter width -> concat ("sent") -> dropout
/// -> dense logits. Throws ConfigError if a filter is wider than max_len.
Model init_text_cnn(std::size_t vocab_size, std::size_t embed_dim,
                    const std::vector<std::size_t>& filter_widths, std::size_t feature_maps,
                    std::size_t num_classes, std::size_t max_len, double dropout, Rng& rng);

/// Activations at a mixable layer. `valid_lens` is only meaningful at "word".
struct Hidden {
  Var value;
  std::vector<std::size_t> valid_lens;
  std::string layer;
};

struct ForwardContext {
  /// Inverted-dropout multipliers for the "sent" layer, [n x sent_dim].
  /// Null in evaluation mode.
  const Tensor* dropout_mask = nullptr;
};

Hidden forward_to_layer(Model& model, Tape& tape, const Batch& batch, std::string_view layer);
Var forward_from_layer(Model& model, Tape& tape, const Hidden& hidden,
                       const ForwardContext& ctx = {});
/// Full network; identical to forward_from_layer(forward_to_layer(b, "word"), "word").
Var forward(Model& model, Tape& tape, const Batch& batch, const ForwardContext& ctx = {});

/// Entries are 0 or 1/(1-p) for drop rate p; all ones when p == 0.
Tensor sample_dropout_mask(const Model& model, std::size_t batch_size, Rng& rng);

/// Reads whitespace-separated word vectors ("word v1 ... vd" per line). Rows
/// of in-vocab words are copied; every other row is drawn from
/// uniform(-0.1, 0.1). The dimension comes from the first line; an empty
/// file yields `fallback_dim` random columns and a warning.
Tensor load_pretrained_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                                  std::size_t fallback_dim, Rng& rng);

}  // namespace amplab
