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
#include "amplab/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "amplab/errors.hpp"
#include "amplab/log.hpp"

namespace amplab {
namespace {

struct RawLine {
  std::string label;
  std::string text;
};

std::vector<RawLine> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus " + path.string());
  std::vector<RawLine> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected '<label>\\t<text>'");
    }
    rows.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (rows.empty()) throw FormatError(path.string() + ": corpus is empty");
  return rows;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

Dataset with_labels(const std::filesystem::path& path, const std::vector<RawLine>& rows,
                    const std::vector<std::string>& names) {
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<int>(i));
  Dataset d;
  d.name = path.stem().string();
  d.num_classes = names.size();
  d.label_names = names;
  d.examples.reserve(rows.size());
  for (const auto& r : rows) {
    auto it = ids.find(r.label);
    if (it == ids.end()) throw FormatError(path.string() + ": unknown label '" + r.label + "'");
    d.examples.push_back({r.text, it->second});
  }
  return d;
}

Dataset copy_meta(const Dataset& src) {
  Dataset d;
  d.name = src.name;
  d.num_classes = src.num_classes;
  d.label_names = src.label_names;
  return d;
}

std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& data) {
  std::vector<std::vector<std::size_t>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    by_class.at(static_cast<std::size_t>(data.examples[i].label)).push_back(i);
  }
  return by_class;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

// Guards floor/ceil against products like 0.04 * 1250 landing a ulp low.
constexpr double kRoundingSlack = 1e-9;

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& e : examples) ++counts.at(static_cast<std::size_t>(e.label));
  return counts;
}

Dataset load_corpus(const std::filesystem::path& path) {
  const auto rows = read_lines(path);
  std::vector<std::string> names;
  const bool numeric = std::all_of(rows.begin(), rows.end(),
                                   [](const RawLine& r) { return parse_int(r.label).has_value(); });
  if (numeric) {
    std::map<long long, std::string> sorted;
    for (const auto& r : rows) sorted.emplace(*parse_int(r.label), r.label);
    for (const auto& [value, text] : sorted) names.push_back(text);
  } else {
    for (const auto& r : rows) {
      if (std::find(names.begin(), names.end(), r.label) == names.end()) names.push_back(r.label);
    }
  }
  return with_labels(path, rows, names);
}

Dataset load_corpus(const std::filesystem::path& path, const std::vector<std::string>& label_names) {
  return with_labels(path, read_lines(path), label_names);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocab build_vocab(const Dataset& train, std::size_t min_freq) {
  if (min_freq == 0) throw ConfigError("min_freq must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& e : train.examples) {
    for (auto& tok : tokenize(e.text)) {
      auto [it, inserted] = counts.try_emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }
  Vocab vocab;
  for (const auto& tok : order) {
    if (counts[tok] >= min_freq) vocab.add(tok);
  }
  return vocab;
}

Batch encode_batch(std::span<const Example> examples, const Vocab& vocab, std::size_t max_len,
                   std::size_t num_classes) {
  if (max_len == 0) throw ConfigError("max_len must be positive");
  if (num_classes == 0) throw ConfigError("num_classes must be positive");
  Batch b;
  b.max_len = max_len;
  b.token_ids.assign(examples.size() * max_len, Vocab::kPad);
  b.valid_lens.resize(examples.size());
  b.labels = Tensor::zeros({examples.size(), num_classes});
  b.label_ids.resize(examples.size());
  for (std::size_t r = 0; r < examples.size(); ++r) {
    const auto tokens = tokenize(examples[r].text);
    const std::size_t len = std::min(tokens.size(), max_len);
    for (std::size_t t = 0; t < len; ++t) b.token_ids[r * max_len + t] = vocab.id(tokens[t]);
    if (len == 0) b.token_ids[r * max_len] = Vocab::kUnk;
    b.valid_lens[r] = std::max<std::size_t>(len, 1);
    const int label = examples[r].label;
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw IndexError("label " + std::to_string(label) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
    b.labels.at(r, static_cast<std::size_t>(label)) = 1.0;
    b.label_ids[r] = label;
  }
  return b;
}

Batch gather_batch(const Batch& all, std::span<const std::size_t> index) {
  const std::size_t c = all.num_classes();
  Batch b;
  b.max_len = all.max_len;
  b.token_ids.resize(index.size() * all.max_len);
  b.valid_lens.resize(index.size());
  b.labels = Tensor::zeros({index.size(), c});
  b.label_ids.resize(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    const std::size_t src = index[r];
    if (src >= all.size()) throw IndexError("gather_batch: row " + std::to_string(src) + " of " + std::to_string(all.size()));
    std::copy_n(all.token_ids.begin() + static_cast<std::ptrdiff_t>(src * all.max_len), all.max_len,
                b.token_ids.begin() + static_cast<std::ptrdiff_t>(r * all.max_len));
    b.valid_lens[r] = all.valid_lens[src];
    b.label_ids[r] = all.label_ids[src];
    for (std::size_t k = 0; k < c; ++k) b.labels.at(r, k) = all.labels.at(src, k);
  }
  return b;
}

std::vector<std::string> decode_row(const Batch& batch, std::size_t row, const Vocab& vocab) {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < batch.valid_lens.at(row); ++t) {
    out.push_back(vocab.token(batch.token_ids[row * batch.max_len + t]));
  }
  return out;
}

Dataset subsample_per_class(const Dataset& data, double ratio, Rng& rng) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("subsample ratio must lie in (0, 1]");
  auto by_class = indices_by_class(data);
  std::vector<std::size_t> keep;
  for (auto& idx : by_class) {
    if (idx.empty()) continue;
    const auto target = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(idx.size()) + kRoundingSlack));
    const std::size_t k = std::max<std::size_t>(1, std::min(target, idx.size()));
    shuffle(idx, rng);
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(keep.begin(), keep.end());
  Dataset out = copy_meta(data);
  for (std::size_t i : keep) out.examples.push_back(data.examples[i]);
  return out;
}

std::pair<Dataset, Dataset> split_dev(const Dataset& data, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("dev fraction must lie in (0, 1)");
  auto by_class = indices_by_class(data);
  std::vector<bool> to_dev(data.examples.size(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() == 1) {
      log::warn("class " + data.label_names.at(c) + " has a single example; kept in train only");
      continue;
    }
    const auto want = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(idx.size()) - kRoundingSlack));
    const std::size_t k = std::clamp<std::size_t>(want, 1, idx.size() - 1);
    shuffle(idx, rng);
    for (std::size_t i = 0; i < k; ++i) to_dev[idx[i]] = true;
  }
  Dataset train = copy_meta(data);
  Dataset dev = copy_meta(data);
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    (to_dev[i] ? dev : train).examples.push_back(data.examples[i]);
  }
  return {std::move(train), std::move(dev)};
}

Dataset generate_synthetic_corpus(const SyntheticSpec& spec, Rng& rng) {
  const std::size_t signal_total = spec.num_classes * spec.signal_tokens_per_class;
  if (spec.num_classes < 2 || spec.per_class == 0 || spec.signal_tokens_per_class == 0) {
    throw ConfigError("synthetic corpus needs >= 2 classes and positive sizes");
  }
  if (spec.vocab_size <= signal_total) {
    throw ConfigError("synthetic vocab_size " + std::to_string(spec.vocab_size) +
                      " must exceed classes * signal tokens = " + std::to_string(signal_total));
  }
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) {
    throw ConfigError("label_noise must lie in [0, 1]");
  }
  const std::size_t noise_pool = spec.vocab_size - signal_total;
  auto signal_token = [&](std::size_t c, std::size_t k) {
    return "c" + std::to_string(c) + "s" + std::to_string(k);
  };

  Dataset d;
  d.name = "synthetic";
  d.num_classes = spec.num_classes;
  for (std::size_t c = 0; c < spec.num_classes; ++c) d.label_names.push_back("class" + std::to_string(c));
  d.examples.reserve(spec.num_classes * spec.per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      const std::size_t signals = 2 + rng.uniform_index(3);
      std::vector<std::string> tokens;
      tokens.reserve(signals + spec.noise_len);
      for (std::size_t s = 0; s < signals; ++s) {
        tokens.push_back(signal_token(c, rng.uniform_index(spec.signal_tokens_per_class)));
      }
      if (rng.uniform() < spec.label_noise) {
        std::size_t other = rng.uniform_index(spec.num_classes - 1);
        if (other >= c) ++other;
        tokens[rng.uniform_index(signals)] =
            signal_token(other, rng.uniform_index(spec.signal_tokens_per_class));
      }
      for (std::size_t t = 0; t < spec.noise_len; ++t) {
        tokens.push_back("w" + std::to_string(rng.uniform_index(noise_pool)));
      }
      for (std::size_t t = tokens.size(); t > 1; --t) std::swap(tokens[t - 1], tokens[rng.uniform_index(t)]);
      std::string text;
      for (const auto& tok : tokens) {
        if (!text.empty()) text.push_back(' ');
        text += tok;
      }
      d.examples.push_back({std::move(text), static_cast<int>(c)});
    }
  }
  return d;
}

std::uint64_t dataset_hash(const Dataset& data) {
  std::uint64_t h = fnv1a64(data.name);
  for (const auto& e : data.examples) {
    h = fnv1a64(std::to_string(e.label), h);
    h = fnv1a64("\t", h);
    h = fnv1a64(e.text, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

}  // namespace amplab
