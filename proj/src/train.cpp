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
#include "amplab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "amplab/errors.hpp"
#include "amplab/optim.hpp"

namespace amplab {
namespace {

constexpr std::size_t kEvalChunk = 256;

StepRecord summarize(const StepResult& r) {
  StepRecord s;
  s.objective = r.loss;
  const auto& b = r.bundle;
  const double n = static_cast<double>(b.loss.size());
  if (b.loss.empty()) return s;
  for (std::size_t k = 0; k < b.loss.size(); ++k) {
    s.mean_loss += b.loss[k];
    s.mean_loss_prime += b.loss_prime[k];
    s.mask_rate += b.mask[k];
    s.mean_abs_grad_lambda += std::fabs(b.grad_lambda[k]);
  }
  s.mean_loss /= n;
  s.mean_loss_prime /= n;
  s.mask_rate /= n;
  s.mean_abs_grad_lambda /= n;
  return s;
}

std::vector<int> predict_in_place(Model& model, const Batch& batch) {
  Tape tape(GradMode::kDisabled);
  const Tensor& logits = forward(model, tape, batch).value();
  const std::size_t n = logits.dim(0);
  const std::size_t c = logits.dim(1);
  std::vector<int> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < c; ++k) {
      if (logits.at(r, k) > logits.at(r, best)) best = k;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
  const auto& dc = config.data;
  Rng root(dc.data_seed);
  Dataset full_train;
  Dataset test;
  if (dc.train_path.empty()) {
    Rng gen_train = root.split("synthetic-train");
    Rng gen_test = root.split("synthetic-test");
    full_train = generate_synthetic_corpus(dc.synthetic, gen_train);
    SyntheticSpec test_spec = dc.synthetic;
    test_spec.per_class = dc.synthetic_test_per_class;
    test = generate_synthetic_corpus(test_spec, gen_test);
    full_train.name = "synthetic-train";
    test.name = "synthetic-test";
  } else {
    full_train = load_corpus(dc.train_path);
    test = load_corpus(dc.test_path, full_train.label_names);
  }
  Rng sub_rng = root.split("subsample");
  if (dc.subsample_ratio < 1.0) full_train = subsample_per_class(full_train, dc.subsample_ratio, sub_rng);
  Rng dev_rng = root.split("dev");
  auto [train, dev] = split_dev(full_train, dc.dev_fraction, dev_rng);

  PreparedData out;
  out.vocab = build_vocab(train, dc.min_freq);
  out.train_hash = dataset_hash(train);
  out.test_hash = dataset_hash(test);
  out.train = std::move(train);
  out.dev = std::move(dev);
  out.test = std::move(test);
  return out;
}

Model build_model(const ExperimentConfig& config, const PreparedData& data, Rng& init) {
  const auto& mc = config.model;
  const std::size_t classes = data.train.num_classes;
  Model model = mc.backbone == Backbone::kEmbedMlp
                    ? init_embed_mlp(data.vocab.size(), mc.embed_dim, mc.hidden_dim, classes, init, mc.dropout)
                    : init_text_cnn(data.vocab.size(), mc.embed_dim, mc.filter_widths, mc.feature_maps, classes,
                                    config.data.max_len, mc.dropout, init);
  if (!mc.pretrained_embeddings.empty()) {
    Rng emb_rng = init.split("pretrained");
    model.set_embedding(load_pretrained_embeddings(mc.pretrained_embeddings, data.vocab, mc.embed_dim, emb_rng));
  }
  model.set_embed_frozen(mc.embed_frozen);
  config.mix.validate(model);
  return model;
}

std::vector<int> predict(const Model& model, const Batch& batch) {
  Model local = model;
  return predict_in_place(local, batch);
}

double evaluate(const Model& model, const Dataset& data, const Vocab& vocab, std::size_t max_len) {
  if (data.examples.empty()) throw ConfigError("evaluate: empty dataset " + data.name);
  const std::size_t len = std::max(max_len, model.min_len());
  Model local = model;
  std::size_t wrong = 0;
  for (std::size_t start = 0; start < data.size(); start += kEvalChunk) {
    const std::size_t stop = std::min(data.size(), start + kEvalChunk);
    std::span<const Example> chunk(data.examples.data() + start, stop - start);
    const Batch batch = encode_batch(chunk, vocab, len, model.num_classes());
    const auto pred = predict_in_place(local, batch);
    for (std::size_t r = 0; r < pred.size(); ++r) {
      if (pred[r] != batch.label_ids[r]) ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

TrainedRun train(const ExperimentConfig& config, const PreparedData& data, std::uint64_t seed,
                 const TrainOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (data.train.examples.empty()) throw ConfigError("train: empty training set");
  Rng root(seed);
  Rng init = root.split("init");
  Rng shuffle = root.split("shuffle");
  Rng mix = root.split("mix");
  Rng dropout = root.split("dropout");

  TrainedRun run{build_model(config, data, init), {}};
  Model& model = run.model;
  TrainReport& report = run.report;
  report.seed = seed;
  report.policy = config.mix.policy;

  const std::size_t max_len = std::max(config.data.max_len, model.min_len());
  const Batch all = encode_batch(data.train.examples, data.vocab, max_len, data.train.num_classes);
  AdamHyper hyper;
  hyper.lr = config.lr;
  AdamState adam = make_adam(model.parameters(), hyper);
  const bool select = !options.skip_model_selection && !data.dev.examples.empty();
  std::vector<Parameter> best = model.parameters();
  report.best_dev_error = 2.0;

  StepOptions step_options;
  step_options.mask_mode = options.mask_mode;
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  while (step < config.max_steps) {
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[shuffle.uniform_index(k)]);
    for (std::size_t start = 0; start < order.size() && step < config.max_steps; start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const Batch batch = gather_batch(all, std::span(order).subspan(start, stop - start));
      model.zero_grad();
      const StepResult result = training_step(model, batch, config.mix, {mix, dropout}, step_options);
      if (!std::isfinite(result.loss)) {
        throw DivergenceError("non-finite loss at step " + std::to_string(step));
      }
      adam_update(model.parameters(), adam);
      report.steps.push_back(summarize(result));
      if (options.on_step) options.on_step(step, batch, result);
      ++step;
    }
    if (select) {
      const double dev_error = evaluate(model, data.dev, data.vocab, max_len);
      report.dev_errors.push_back(dev_error);
      if (dev_error < report.best_dev_error) {
        report.best_dev_error = dev_error;
        report.best_step = step;
        best = model.parameters();
      }
    }
  }
  model.zero_grad();
  if (select) {
    for (std::size_t k = 0; k < best.size(); ++k) model.parameters()[k].tensor.values = best[k].tensor.values;
  } else {
    report.best_step = step;
    report.best_dev_error = data.dev.examples.empty() ? 1.0 : evaluate(model, data.dev, data.vocab, max_len);
  }
  report.test_error = evaluate(model, data.test, data.vocab, max_len);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace amplab
