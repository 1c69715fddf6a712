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
#include "amplab/models.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "amplab/errors.hpp"
#include "amplab/log.hpp"
#include "amplab/ops.hpp"

namespace amplab {
namespace {

constexpr double kInitRange = 0.1;

void fill_uniform(Tensor& t, Rng& rng) {
  for (double& v : t.values) v = rng.uniform(-kInitRange, kInitRange);
}

std::string conv_name(std::size_t width, std::string_view suffix) {
  return "conv" + std::to_string(width) + "." + std::string(suffix);
}

Var sent_from_word(Model& model, Tape& tape, const Hidden& word) {
  switch (model.kind()) {
    case Backbone::kEmbedMlp: {
      Var pooled = ops::mean_pool(word.value, word.valid_lens);
      Var h = ops::matmul(pooled, tape.leaf(model.param("hidden.weight")));
      return ops::tanh(ops::add_row_bias(h, tape.leaf(model.param("hidden.bias"))));
    }
    case Backbone::kTextCnn: {
      std::vector<Var> maps;
      for (std::size_t w : model.filter_widths()) {
        maps.push_back(ops::conv1d_maxpool(word.value, tape.leaf(model.param(conv_name(w, "weight"))),
                                           tape.leaf(model.param(conv_name(w, "bias")))));
      }
      return ops::concat_cols(maps);
    }
  }
  throw ContractError("unknown backbone");
}

void check_hidden_shape(const Model& model, const Hidden& hidden) {
  const Shape& s = hidden.value.shape();
  if (hidden.layer == kWordLayer) {
    if (s.size() != 3 || s[2] != model.embed_dim() || s[1] < model.min_len() ||
        hidden.valid_lens.size() != s[0]) {
      throw DimensionError("word-layer hidden has shape " + shape_str(s) + "; expected [n x len>=" +
                           std::to_string(model.min_len()) + " x " +
                           std::to_string(model.embed_dim()) + "] with n valid lengths");
    }
  } else if (hidden.layer == kSentLayer) {
    if (s.size() != 2 || s[1] != model.sent_dim()) {
      throw DimensionError("sent-layer hidden has shape " + shape_str(s) + "; expected [n x " +
                           std::to_string(model.sent_dim()) + "]");
    }
  } else {
    throw ConfigError("unknown layer '" + hidden.layer + "'");
  }
}

}  // namespace

std::string_view to_string(Backbone kind) {
  return kind == Backbone::kEmbedMlp ? "embed-mlp" : "text-cnn";
}

Backbone parse_backbone(std::string_view name) {
  if (name == "embed-mlp") return Backbone::kEmbedMlp;
  if (name == "text-cnn") return Backbone::kTextCnn;
  throw ConfigError("unknown backbone '" + std::string(name) + "'");
}

bool Model::has_layer(std::string_view layer) const {
  return std::find(layer_names_.begin(), layer_names_.end(), layer) != layer_names_.end();
}

Tensor& Model::param(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  throw ConfigError("model has no parameter '" + std::string(name) + "'");
}

const Tensor& Model::param(std::string_view name) const {
  return const_cast<Model*>(this)->param(name);
}

std::size_t Model::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.tensor.numel();
  return total;
}

void Model::set_embed_frozen(bool frozen) {
  embed_frozen_ = frozen;
  param("embedding").requires_grad = !frozen;
}

void Model::set_embedding(const Tensor& table) {
  Tensor& e = param("embedding");
  if (table.shape != e.shape) {
    throw DimensionError("embedding table " + shape_str(table.shape) + " does not match " +
                         shape_str(e.shape));
  }
  e.values = table.values;
}

void Model::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

Tensor& Model::add_param(std::string name, Shape shape) {
  params_.push_back({std::move(name), Tensor::zeros(std::move(shape), true)});
  return params_.back().tensor;
}

Model init_embed_mlp(std::size_t vocab_size, std::size_t embed_dim, std::size_t hidden_dim,
                     std::size_t num_classes, Rng& rng, double dropout) {
  if (vocab_size == 0 || embed_dim == 0 || hidden_dim == 0 || num_classes == 0) {
    throw ConfigError("embed-mlp dimensions must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  Model m;
  m.kind_ = Backbone::kEmbedMlp;
  m.layer_names_ = {std::string(kWordLayer), std::string(kSentLayer)};
  m.vocab_size_ = vocab_size;
  m.embed_dim_ = embed_dim;
  m.sent_dim_ = hidden_dim;
  m.num_classes_ = num_classes;
  m.dropout_ = dropout;
  m.params_.reserve(5);
  fill_uniform(m.add_param("embedding", {vocab_size, embed_dim}), rng);
  fill_uniform(m.add_param("hidden.weight", {embed_dim, hidden_dim}), rng);
  m.add_param("hidden.bias", {hidden_dim});
  fill_uniform(m.add_param("output.weight", {hidden_dim, num_classes}), rng);
  m.add_param("output.bias", {num_classes});
  return m;
}

Model init_text_cnn(std::size_t vocab_size, std::size_t embed_dim,
                    const std::vector<std::size_t>& filter_widths, std::size_t feature_maps,
                    std::size_t num_classes, std::size_t max_len, double dropout, Rng& rng) {
  if (vocab_size == 0 || embed_dim == 0 || feature_maps == 0 || num_classes == 0 ||
      filter_widths.empty()) {
    throw ConfigError("text-cnn dimensions must be positive");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  const std::size_t widest = *std::max_element(filter_widths.begin(), filter_widths.end());
  if (widest == 0) throw ConfigError("filter width must be positive");
  if (widest > max_len) {
    throw ConfigError("filter width " + std::to_string(widest) + " exceeds max_len " +
                      std::to_string(max_len));
  }
  Model m;
  m.kind_ = Backbone::kTextCnn;
  m.layer_names_ = {std::string(kWordLayer), std::string(kSentLayer)};
  m.vocab_size_ = vocab_size;
  m.embed_dim_ = embed_dim;
  m.sent_dim_ = feature_maps * filter_widths.size();
  m.num_classes_ = num_classes;
  m.min_len_ = widest;
  m.filter_widths_ = filter_widths;
  m.dropout_ = dropout;
  m.params_.reserve(3 + 2 * filter_widths.size());
  fill_uniform(m.add_param("embedding", {vocab_size, embed_dim}), rng);
  for (std::size_t w : filter_widths) {
    fill_uniform(m.add_param(conv_name(w, "weight"), {w, embed_dim, feature_maps}), rng);
    m.add_param(conv_name(w, "bias"), {feature_maps});
  }
  fill_uniform(m.add_param("output.weight", {m.sent_dim_, num_classes}), rng);
  m.add_param("output.bias", {num_classes});
  return m;
}

Hidden forward_to_layer(Model& model, Tape& tape, const Batch& batch, std::string_view layer) {
  if (!model.has_layer(layer)) throw ConfigError("unknown layer '" + std::string(layer) + "'");
  const std::size_t n = batch.size();
  if (batch.token_ids.size() != n * batch.max_len) {
    throw DimensionError("batch token grid does not match its valid lengths");
  }
  if (batch.max_len < model.min_len()) {
    throw InputTooShortError("batch max_len " + std::to_string(batch.max_len) +
                             " shorter than widest filter " + std::to_string(model.min_len()));
  }
  Var table = tape.leaf(model.param("embedding"));
  Var rows = ops::embedding_lookup(table, batch.token_ids);
  Hidden word{ops::reshape(rows, {n, batch.max_len, model.embed_dim()}), batch.valid_lens,
              std::string(kWordLayer)};
  if (layer == kWordLayer) return word;
  return Hidden{sent_from_word(model, tape, word), batch.valid_lens, std::string(kSentLayer)};
}

Var forward_from_layer(Model& model, Tape& tape, const Hidden& hidden, const ForwardContext& ctx) {
  check_hidden_shape(model, hidden);
  Var sent = hidden.layer == kWordLayer ? sent_from_word(model, tape, hidden) : hidden.value;
  if (ctx.dropout_mask) {
    if (ctx.dropout_mask->shape != sent.shape()) {
      throw DimensionError("dropout mask " + shape_str(ctx.dropout_mask->shape) + " vs sent layer " +
                           shape_str(sent.shape()));
    }
    sent = ops::mul(sent, tape.constant(*ctx.dropout_mask));
  }
  Var logits = ops::matmul(sent, tape.leaf(model.param("output.weight")));
  return ops::add_row_bias(logits, tape.leaf(model.param("output.bias")));
}

Var forward(Model& model, Tape& tape, const Batch& batch, const ForwardContext& ctx) {
  return forward_from_layer(model, tape, forward_to_layer(model, tape, batch, kWordLayer), ctx);
}

Tensor sample_dropout_mask(const Model& model, std::size_t batch_size, Rng& rng) {
  Tensor mask = Tensor::filled({batch_size, model.sent_dim()}, 1.0);
  const double p = model.dropout();
  if (p <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& v : mask.values) v = rng.uniform() < p ? 0.0 : keep_scale;
  return mask;
}

Tensor load_pretrained_embeddings(const std::filesystem::path& path, const Vocab& vocab,
                                  std::size_t fallback_dim, Rng& rng) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embedding file " + path.string());

  std::vector<std::pair<int, std::vector<double>>> found;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> vec;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
      vec.push_back(v);
    }
    if (dim == 0) {
      if (vec.empty()) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": no vector components");
      }
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " components, got " + std::to_string(vec.size()));
    }
    if (auto id = vocab.find(word)) found.emplace_back(*id, std::move(vec));
  }
  if (dim == 0) {
    log::warn("embedding file " + path.string() + " is empty; all rows randomly initialized");
    dim = fallback_dim;
  }
  Tensor table = Tensor::zeros({vocab.size(), dim});
  fill_uniform(table, rng);
  for (const auto& [id, vec] : found) {
    std::copy(vec.begin(), vec.end(),
              table.values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(id) * dim));
  }
  return table;
}

}  // namespace amplab
