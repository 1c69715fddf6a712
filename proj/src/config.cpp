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
#include "amplab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "amplab/errors.hpp"

namespace amplab {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid number '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + value + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(value)) {
    if (auto dots = item.find(".."); dots != std::string::npos) {
      const auto lo = parse_number<std::uint64_t>(item.substr(0, dots));
      const auto hi = parse_number<std::uint64_t>(item.substr(dots + 2));
      if (hi < lo) throw ConfigError("empty seed range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_number<std::uint64_t>(item));
    }
  }
  return seeds;
}

template <typename T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Key {
  const char* description;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, Key, std::less<>>& keys() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::map<std::string, Key, std::less<>> table = {
      {"policy", {"training policy: none | mixup | amp",
                  [](C& c, S v) { c.mix.policy = parse_policy(v); },
                  [](const C& c) { return std::string(to_string(c.mix.policy)); }}},
      {"alpha", {"Beta(alpha, alpha) parameter for lambda",
                 [](C& c, S v) { c.mix.alpha = parse_number<double>(v); },
                 [](const C& c) { return fmt_double(c.mix.alpha); }}},
      {"epsilon", {"lambda perturbation step size",
                   [](C& c, S v) { c.mix.epsilon = parse_number<double>(v); },
                   [](const C& c) { return fmt_double(c.mix.epsilon); }}},
      {"mix_layer", {"mixing layer: word | sent",
                     [](C& c, S v) { c.mix.layer = v; },
                     [](const C& c) { return c.mix.layer; }}},
      {"per_pair_lambda", {"one lambda per pair (true) or per batch (false)",
                           [](C& c, S v) { c.mix.per_pair_lambda = parse_bool(v); },
                           [](const C& c) { return std::string(c.mix.per_pair_lambda ? "true" : "false"); }}},
      {"backbone", {"embed-mlp | text-cnn",
                    [](C& c, S v) { c.model.backbone = parse_backbone(v); },
                    [](const C& c) { return std::string(to_string(c.model.backbone)); }}},
      {"embed_dim", {"word embedding width",
                     [](C& c, S v) { c.model.embed_dim = parse_number<std::size_t>(v); },
                     [](const C& c) { return std::to_string(c.model.embed_dim); }}},
      {"hidden_dim", {"embed-mlp hidden width",
                      [](C& c, S v) { c.model.hidden_dim = parse_number<std::size_t>(v); },
                      [](const C& c) { return std::to_string(c.model.hidden_dim); }}},
      {"filter_widths", {"text-cnn filter widths, comma separated",
                         [](C& c, S v) {
                           c.model.filter_widths.clear();
                           for (const auto& w : split_list(v)) c.model.filter_widths.push_back(parse_number<std::size_t>(w));
                         },
                         [](const C& c) {
                           return join<std::size_t>(c.model.filter_widths, [](const std::size_t& w) { return std::to_string(w); });
                         }}},
      {"feature_maps", {"text-cnn feature maps per width",
                        [](C& c, S v) { c.model.feature_maps = parse_number<std::size_t>(v); },
                        [](const C& c) { return std::to_string(c.model.feature_maps); }}},
      {"dropout", {"dropout rate on the sent layer",
                   [](C& c, S v) { c.model.dropout = parse_number<double>(v); },
                   [](const C& c) { return fmt_double(c.model.dropout); }}},
      {"embed_frozen", {"keep embeddings fixed during training",
                        [](C& c, S v) { c.model.embed_frozen = parse_bool(v); },
                        [](const C& c) { return std::string(c.model.embed_frozen ? "true" : "false"); }}},
      {"pretrained_embeddings", {"word-vector text file (optional)",
                                 [](C& c, S v) { c.model.pretrained_embeddings = v; },
                                 [](const C& c) { return c.model.pretrained_embeddings; }}},
      {"batch_size", {"mini-batch size",
                      [](C& c, S v) { c.batch_size = parse_number<std::size_t>(v); },
                      [](const C& c) { return std::to_string(c.batch_size); }}},
      {"lr", {"Adam learning rate",
              [](C& c, S v) { c.lr = parse_number<double>(v); },
              [](const C& c) { return fmt_double(c.lr); }}},
      {"max_steps", {"optimizer steps per run",
                     [](C& c, S v) { c.max_steps = parse_number<std::size_t>(v); },
                     [](const C& c) { return std::to_string(c.max_steps); }}},
      {"seeds", {"run seeds: list and/or ranges, e.g. 0..9,42",
                 [](C& c, S v) { c.seeds = parse_seeds(v); },
                 [](const C& c) {
                   return join<std::uint64_t>(c.seeds, [](const std::uint64_t& s) { return std::to_string(s); });
                 }}},
      {"policies", {"policies compared by multi-seed runs",
                    [](C& c, S v) {
                      c.policies.clear();
                      for (const auto& p : split_list(v)) c.policies.push_back(parse_policy(p));
                    },
                    [](const C& c) {
                      return join<Policy>(c.policies, [](const Policy& p) { return std::string(to_string(p)); });
                    }}},
      {"threads", {"parallel runs (0 = all cores)",
                   [](C& c, S v) { c.threads = parse_number<std::size_t>(v); },
                   [](const C& c) { return std::to_string(c.threads); }}},
      {"train_path", {"training corpus (<label>\\t<text>); empty = synthetic",
                      [](C& c, S v) { c.data.train_path = v; },
                      [](const C& c) { return c.data.train_path; }}},
      {"test_path", {"test corpus; required with train_path",
                     [](C& c, S v) { c.data.test_path = v; },
                     [](const C& c) { return c.data.test_path; }}},
      {"subsample_ratio", {"per-class fraction of training data kept",
                           [](C& c, S v) { c.data.subsample_ratio = parse_number<double>(v); },
                           [](const C& c) { return fmt_double(c.data.subsample_ratio); }}},
      {"dev_fraction", {"fraction of training data held out for model selection",
                        [](C& c, S v) { c.data.dev_fraction = parse_number<double>(v); },
                        [](const C& c) { return fmt_double(c.data.dev_fraction); }}},
      {"max_len", {"padded sequence length",
                   [](C& c, S v) { c.data.max_len = parse_number<std::size_t>(v); },
                   [](const C& c) { return std::to_string(c.data.max_len); }}},
      {"min_freq", {"vocabulary frequency cutoff",
                    [](C& c, S v) { c.data.min_freq = parse_number<std::size_t>(v); },
                    [](const C& c) { return std::to_string(c.data.min_freq); }}},
      {"data_seed", {"seed of the synthetic corpus",
                     [](C& c, S v) { c.data.data_seed = parse_number<std::uint64_t>(v); },
                     [](const C& c) { return std::to_string(c.data.data_seed); }}},
      {"synthetic_classes", {"synthetic: number of classes",
                             [](C& c, S v) { c.data.synthetic.num_classes = parse_number<std::size_t>(v); },
                             [](const C& c) { return std::to_string(c.data.synthetic.num_classes); }}},
      {"synthetic_per_class", {"synthetic: training examples per class",
                               [](C& c, S v) { c.data.synthetic.per_class = parse_number<std::size_t>(v); },
                               [](const C& c) { return std::to_string(c.data.synthetic.per_class); }}},
      {"synthetic_test_per_class", {"synthetic: test examples per class",
                                    [](C& c, S v) { c.data.synthetic_test_per_class = parse_number<std::size_t>(v); },
                                    [](const C& c) { return std::to_string(c.data.synthetic_test_per_class); }}},
      {"synthetic_vocab", {"synthetic: distinct token types",
                           [](C& c, S v) { c.data.synthetic.vocab_size = parse_number<std::size_t>(v); },
                           [](const C& c) { return std::to_string(c.data.synthetic.vocab_size); }}},
      {"synthetic_signal_tokens", {"synthetic: signal tokens owned by each class",
                                   [](C& c, S v) { c.data.synthetic.signal_tokens_per_class = parse_number<std::size_t>(v); },
                                   [](const C& c) { return std::to_string(c.data.synthetic.signal_tokens_per_class); }}},
      {"synthetic_noise_len", {"synthetic: noise tokens per example",
                               [](C& c, S v) { c.data.synthetic.noise_len = parse_number<std::size_t>(v); },
                               [](const C& c) { return std::to_string(c.data.synthetic.noise_len); }}},
      {"synthetic_label_noise", {"synthetic: fraction with a foreign signal token",
                                 [](C& c, S v) { c.data.synthetic.label_noise = parse_number<double>(v); },
                                 [](const C& c) { return fmt_double(c.data.synthetic.label_noise); }}},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  mix.validate();
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (max_steps == 0) throw ConfigError("max_steps must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (policies.empty()) throw ConfigError("policies must not be empty");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (model.dropout < 0.0 || model.dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  if (!(data.subsample_ratio > 0.0 && data.subsample_ratio <= 1.0)) {
    throw ConfigError("subsample_ratio must lie in (0, 1]");
  }
  if (!(data.dev_fraction > 0.0 && data.dev_fraction < 1.0)) {
    throw ConfigError("dev_fraction must lie in (0, 1)");
  }
  if (data.max_len == 0) throw ConfigError("max_len must be positive");
  if (data.train_path.empty() != data.test_path.empty()) {
    throw ConfigError("train_path and test_path must be given together");
  }
  if (model.backbone == Backbone::kTextCnn) {
    for (std::size_t w : model.filter_widths) {
      if (w == 0 || w > data.max_len) {
        throw ConfigError("filter width " + std::to_string(w) + " incompatible with max_len " +
                          std::to_string(data.max_len));
      }
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    auto it = keys().find(key);
    if (it == keys().end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second.set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + " = " + key.get(config) + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> config_schema() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, key] : keys()) out.emplace_back(name, key.description);
  return out;
}

}  // namespace amplab
