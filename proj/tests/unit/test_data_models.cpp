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

#include <filesystem>
#include <fstream>
#include <numeric>

#include "amplab/data.hpp"
#include "amplab/errors.hpp"
#include "amplab/gradcheck.hpp"
#include "amplab/log.hpp"
#include "amplab/models.hpp"
#include "amplab/ops.hpp"

namespace amplab {
namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("amplab_test_" + name);
  std::ofstream(path) << text;
  return path;
}

Dataset with_counts(const std::vector<std::size_t>& counts) {
  Dataset d;
  d.num_classes = counts.size();
  d.label_names.resize(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    d.label_names[c] = "c" + std::to_string(c);
    for (std::size_t k = 0; k < counts[c]; ++k) {
      d.examples.push_back({"ex " + std::to_string(c) + " " + std::to_string(k), static_cast<int>(c)});
    }
  }
  return d;
}

TEST(Corpus, ReadsLabelsAndTexts) {
  const auto path = write_temp("corpus.tsv", "pos\tGood film\r\n\nneg\tbad plot\npos\tnice\n");
  const Dataset d = load_corpus(path);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.label_names, (std::vector<std::string>{"pos", "neg"}));
  EXPECT_EQ(d.examples[1].label, 1);
  EXPECT_EQ(d.examples[0].text, "Good film");
}

TEST(Corpus, NumericLabelsMapInAscendingOrder) {
  const auto path = write_temp("numeric.tsv", "3\ta\n1\tb\n2\tc\n");
  EXPECT_EQ(load_corpus(path).label_names, (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Corpus, ErrorsNameTheLine) {
  const auto bad = write_temp("bad.tsv", "pos\tok\nno tab here\n");
  try {
    load_corpus(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  EXPECT_THROW(load_corpus(write_temp("empty.tsv", "\n\n")), FormatError);
  EXPECT_THROW(load_corpus("/nonexistent/corpus.tsv"), IoError);
  EXPECT_THROW(load_corpus(write_temp("unknown.tsv", "zzz\tx\n"), {"pos", "neg"}), FormatError);
}

TEST(Tokenize, LowercasesAndSplitsOnWhitespace) {
  EXPECT_EQ(tokenize("  The CAT\tsat \n"), (std::vector<std::string>{"the", "cat", "sat"}));
  EXPECT_TRUE(tokenize("").empty());
}

TEST(Vocab, ReservedIdsAndFrequencyCutoff) {
  Dataset d = with_counts({0});
  d.num_classes = 1;
  d.examples = {{"a b a", 0}, {"c a", 0}};
  const Vocab v = build_vocab(d, 2);
  EXPECT_EQ(v.id("<pad>"), Vocab::kPad);
  EXPECT_EQ(v.id("a"), 2);
  EXPECT_EQ(v.id("b"), Vocab::kUnk);
  EXPECT_EQ(build_vocab(d, 1).size(), 5u);
  EXPECT_THROW(build_vocab(d, 0), ConfigError);
  EXPECT_THROW(v.token(99), IndexError);
}

TEST(Encode, RoundTripsInVocabText) {
  Dataset d;
  d.num_classes = 2;
  d.examples = {{"The quick fox", 0}, {"lazy dog", 1}};
  const Vocab v = build_vocab(d, 1);
  const Batch b = encode_batch(d.examples, v, 5, 2);
  EXPECT_EQ(decode_row(b, 0, v), (std::vector<std::string>{"the", "quick", "fox"}));
  EXPECT_EQ(b.valid_lens, (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(b.token_ids[4], Vocab::kPad);
  EXPECT_EQ(b.labels.at(1, 1), 1.0);
}

TEST(Encode, TruncatesAndHandlesEmptyText) {
  Dataset d;
  d.num_classes = 2;
  d.examples = {{"a b c d e f", 0}, {"", 1}};
  const Vocab v = build_vocab(d, 1);
  const Batch b = encode_batch(d.examples, v, 3, 2);
  EXPECT_EQ(b.valid_lens, (std::vector<std::size_t>{3, 1}));
  EXPECT_EQ(b.token_ids[3], Vocab::kUnk);
}

TEST(Encode, GatherSelectsRows) {
  Dataset d;
  d.num_classes = 2;
  d.examples = {{"a", 0}, {"b b", 1}, {"c", 0}};
  const Vocab v = build_vocab(d, 1);
  const Batch all = encode_batch(d.examples, v, 2, 2);
  const std::vector<std::size_t> idx{2, 1};
  const Batch g = gather_batch(all, idx);
  EXPECT_EQ(g.label_ids, (std::vector<int>{0, 1}));
  EXPECT_EQ(g.valid_lens, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(decode_row(g, 0, v), (std::vector<std::string>{"c"}));
}

TEST(Subsample, LowResourceLabelCountsOfSixClassBenchmark) {
  const Dataset full = with_counts({86, 1162, 1250, 1223, 835, 896});
  const std::vector<std::pair<double, std::size_t>> expected{{0.03, 160}, {0.04, 215}, {0.05, 270}, {0.10, 543}};
  for (const auto& [ratio, total] : expected) {
    Rng rng(1);
    EXPECT_EQ(subsample_per_class(full, ratio, rng).size(), total) << "ratio " << ratio;
  }
}

TEST(Subsample, NeverEmptiesAClassAndKeepsOrder) {
  const Dataset full = with_counts({3, 40});
  Rng rng(2);
  const Dataset s = subsample_per_class(full, 0.1, rng);
  EXPECT_EQ(s.class_counts(), (std::vector<std::size_t>{1, 4}));
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.examples[i].label == s.examples[i - 1].label && s.examples[i].label == 1) {
      const auto k = [](const Example& e) { return std::stoi(e.text.substr(e.text.rfind(' ') + 1)); };
      EXPECT_LT(k(s.examples[i - 1]), k(s.examples[i]));
    }
  }
  Rng again(2);
  EXPECT_EQ(subsample_per_class(full, 0.1, again).examples, s.examples);
  EXPECT_EQ(subsample_per_class(full, 1.0, again).size(), full.size());
}

TEST(SplitDev, StratifiedPartition) {
  const Dataset full = with_counts({50, 50});
  Rng rng(3);
  auto [train, dev] = split_dev(full, 0.1, rng);
  EXPECT_EQ(dev.class_counts(), (std::vector<std::size_t>{5, 5}));
  EXPECT_EQ(train.size() + dev.size(), full.size());
  std::vector<std::string> all;
  for (const auto& e : train.examples) all.push_back(e.text);
  for (const auto& e : dev.examples) all.push_back(e.text);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::unique(all.begin(), all.end()), all.end());
}

TEST(SplitDev, SingletonClassStaysInTrainWithWarning) {
  const Dataset full = with_counts({1, 10});
  Rng rng(4);
  log::ScopedWarningCapture capture;
  auto [train, dev] = split_dev(full, 0.1, rng);
  EXPECT_EQ(train.class_counts()[0], 1u);
  EXPECT_EQ(dev.class_counts()[0], 0u);
  EXPECT_FALSE(capture.messages().empty());
}

TEST(Synthetic, BalancedDeterministicAndSignalBearing) {
  SyntheticSpec spec;
  Rng a(5), b(5);
  const Dataset d = generate_synthetic_corpus(spec, a);
  EXPECT_EQ(d.size(), 600u);
  EXPECT_EQ(d.class_counts(), std::vector<std::size_t>(6, 100));
  EXPECT_EQ(dataset_hash(d), dataset_hash(generate_synthetic_corpus(spec, b)));
  for (const auto& e : d.examples) {
    const auto toks = tokenize(e.text);
    const std::string own = "c" + std::to_string(e.label) + "s";
    EXPECT_TRUE(std::any_of(toks.begin(), toks.end(), [&](const std::string& t) { return t.rfind(own, 0) == 0; }));
  }
}

TEST(Synthetic, ZeroNoiseLengthKeepsOnlySignal) {
  SyntheticSpec spec;
  spec.noise_len = 0;
  Rng rng(6);
  for (const auto& e : generate_synthetic_corpus(spec, rng).examples) {
    const auto toks = tokenize(e.text);
    EXPECT_GE(toks.size(), 2u);
    EXPECT_LE(toks.size(), 4u);
    for (const auto& t : toks) EXPECT_EQ(t[0], 'c');
  }
}

TEST(Synthetic, RejectsInconsistentSizes) {
  SyntheticSpec spec;
  spec.vocab_size = 50;
  Rng rng(7);
  EXPECT_THROW(generate_synthetic_corpus(spec, rng), ConfigError);
}

TEST(Models, EmbedMlpShapesAndLayers) {
  Rng rng(1);
  Model m = init_embed_mlp(30, 8, 5, 4, rng);
  EXPECT_EQ(m.parameter_count(), 30u * 8 + 8 * 5 + 5 + 5 * 4 + 4);
  EXPECT_TRUE(m.has_layer("word"));
  EXPECT_TRUE(m.has_layer("sent"));
  Rng data(2);
  const Batch b = random_batch(3, 6, 30, 4, data);
  Tape tape(GradMode::kDisabled);
  EXPECT_EQ(forward(m, tape, b).shape(), (Shape{3, 4}));
  EXPECT_EQ(forward_to_layer(m, tape, b, "sent").value.shape(), (Shape{3, 5}));
  EXPECT_EQ(forward_to_layer(m, tape, b, "word").value.shape(), (Shape{3, 6, 8}));
}

TEST(Models, SplitForwardEqualsFullForward) {
  for (int kind = 0; kind < 2; ++kind) {
    Rng rng(3);
    Model m = kind == 0 ? init_embed_mlp(30, 8, 5, 4, rng) : init_text_cnn(30, 8, {2, 3}, 4, 4, 6, 0.0, rng);
    Rng data(4);
    const Batch b = random_batch(3, 6, 30, 4, data);
    for (const char* layer : {"word", "sent"}) {
      Tape tape(GradMode::kDisabled);
      const Tensor full = forward(m, tape, b).value();
      const Tensor split = forward_from_layer(m, tape, forward_to_layer(m, tape, b, layer)).value();
      EXPECT_EQ(full.values, split.values) << layer;
    }
  }
}

TEST(Models, TextCnnRejectsWideFiltersAndShortBatches) {
  Rng rng(5);
  EXPECT_THROW(init_text_cnn(30, 8, {3, 7}, 4, 2, 5, 0.5, rng), ConfigError);
  Model m = init_text_cnn(30, 8, {3}, 4, 2, 5, 0.5, rng);
  Rng data(6);
  const Batch b = random_batch(2, 2, 30, 2, data);
  Tape tape(GradMode::kDisabled);
  EXPECT_THROW(forward(m, tape, b), InputTooShortError);
}

TEST(Models, DropoutMaskEntries) {
  Rng rng(7);
  Model m = init_text_cnn(30, 8, {2}, 10, 2, 5, 0.5, rng);
  Rng d(8);
  const Tensor mask = sample_dropout_mask(m, 20, d);
  EXPECT_EQ(mask.shape, (Shape{20, 10}));
  for (double v : mask.values) EXPECT_TRUE(v == 0.0 || v == 2.0);
  Model plain = init_embed_mlp(30, 8, 5, 2, rng);
  for (double v : sample_dropout_mask(plain, 4, d).values) EXPECT_EQ(v, 1.0);
}

TEST(Models, FrozenEmbeddingsGetNoGradient) {
  Rng rng(9);
  Model m = init_embed_mlp(30, 4, 5, 3, rng);
  m.set_embed_frozen(true);
  Rng data(10);
  const Batch b = random_batch(3, 6, 30, 3, data);
  Tape tape;
  tape.backward(ops::mean(ops::softmax_cross_entropy(forward(m, tape, b), b.labels)));
  const auto& e = m.param("embedding");
  EXPECT_TRUE(!e.grad || std::all_of(e.grad->begin(), e.grad->end(), [](double g) { return g == 0.0; }));
  EXPECT_TRUE(m.param("output.weight").grad.has_value());
  EXPECT_THROW(m.param("missing"), ConfigError);
}

TEST(Models, PretrainedEmbeddings) {
  Dataset d;
  d.num_classes = 2;
  d.examples = {{"alpha beta gamma", 0}};
  const Vocab v = build_vocab(d, 1);
  const auto path = write_temp("vectors.txt", "beta 0.5 -0.5 1.0\nzeta 1 1 1\nalpha 2 2 2\n");
  Rng rng(11);
  const Tensor t = load_pretrained_embeddings(path, v, 3, rng);
  EXPECT_EQ(t.shape, (Shape{v.size(), 3}));
  EXPECT_EQ(t.at(static_cast<std::size_t>(v.id("beta")), 2), 1.0);
  EXPECT_EQ(t.at(static_cast<std::size_t>(v.id("alpha")), 0), 2.0);
  EXPECT_THROW(load_pretrained_embeddings(write_temp("bad_vec.txt", "a 1 2\nb 1\n"), v, 3, rng), FormatError);
  EXPECT_THROW(load_pretrained_embeddings("/nonexistent.vec", v, 3, rng), IoError);
  log::ScopedWarningCapture capture;
  EXPECT_EQ(load_pretrained_embeddings(write_temp("empty.vec", ""), v, 4, rng).shape, (Shape{v.size(), 4}));
  EXPECT_FALSE(capture.messages().empty());
}

}  // namespace
}  // namespace amplab
