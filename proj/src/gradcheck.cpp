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
#include "amplab/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "amplab/errors.hpp"
#include "amplab/finite_diff.hpp"
#include "amplab/mixup.hpp"
#include "amplab/ops.hpp"

namespace amplab {
namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values) v = rng.uniform(lo, hi);
  return t;
}

// Values in [0.05, 1] with a random sign, away from the relu kink.
Tensor kink_free_tensor(Shape shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values) v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.05, 1.0);
  return t;
}

Var weighted_sum(Var y, const Tensor& w) {
  Tape& tape = *y.tape;
  return ops::sum(ops::mul(y, tape.constant(w)));
}

Tensor weights_like(const Shape& shape, Rng& rng) { return random_tensor(shape, rng, -1.0, 1.0); }

struct Suite {
  const GradcheckOptions& options;
  std::vector<GradcheckEntry> entries;

  void check(const std::string& name, const ScalarGraph& f, const Tensor& x) {
    auto prepare = [&](Tape& tape) {
      if (!options.inject_sign_flip.empty()) tape.inject_sign_flip(options.inject_sign_flip);
    };
    const auto report = finite_diff_report(f, x, options.h, prepare);
    entries.push_back({name, x.numel(), report.max_rel_error, options.tolerance,
                       report.max_rel_error <= options.tolerance});
  }
};

}  // namespace

Batch random_batch(std::size_t n, std::size_t max_len, std::size_t vocab_size,
                   std::size_t num_classes, Rng& rng, std::size_t min_len) {
  if (vocab_size < 3 || num_classes < 2 || min_len == 0 || min_len > max_len) {
    throw ConfigError("random_batch: invalid sizes");
  }
  Batch b;
  b.max_len = max_len;
  b.token_ids.assign(n * max_len, 0);
  b.valid_lens.resize(n);
  b.labels = Tensor::zeros({n, num_classes});
  b.label_ids.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t len = min_len + rng.uniform_index(max_len - min_len + 1);
    b.valid_lens[r] = len;
    for (std::size_t t = 0; t < len; ++t) {
      b.token_ids[r * max_len + t] = static_cast<int>(1 + rng.uniform_index(vocab_size - 1));
    }
    const int y = static_cast<int>(rng.uniform_index(num_classes));
    b.label_ids[r] = y;
    b.labels.at(r, static_cast<std::size_t>(y)) = 1.0;
  }
  return b;
}

std::vector<GradcheckEntry> check_model_gradients(Model& model, const ModelLoss& loss, double h,
                                                  double tolerance,
                                                  const std::string& inject_sign_flip) {
  model.zero_grad();
  {
    Tape tape;
    if (!inject_sign_flip.empty()) tape.inject_sign_flip(inject_sign_flip);
    tape.backward(loss(model, tape));
  }
  auto eval = [&] {
    Tape tape(GradMode::kDisabled);
    return loss(model, tape).value().values.at(0);
  };
  std::vector<GradcheckEntry> out;
  for (auto& p : model.parameters()) {
    if (!p.tensor.requires_grad) continue;
    const std::vector<double> analytic = p.tensor.grad.value_or(std::vector<double>(p.tensor.numel(), 0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < p.tensor.numel(); ++i) {
      const double orig = p.tensor.values[i];
      p.tensor.values[i] = orig + h;
      const double up = eval();
      p.tensor.values[i] = orig - h;
      const double down = eval();
      p.tensor.values[i] = orig;
      worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic[i]));
    }
    out.push_back({p.name, p.tensor.numel(), worst, tolerance, worst <= tolerance});
  }
  model.zero_grad();
  return out;
}

std::vector<GradcheckEntry> run_gradcheck(const GradcheckOptions& options) {
  Rng rng(options.seed);
  Suite s{options, {}};

  {
    const Tensor a = random_tensor({3, 4}, rng);
    const Tensor b = random_tensor({4, 2}, rng);
    const Tensor w = weights_like({3, 2}, rng);
    s.check("matmul/lhs", [&](Tape& t, Var x) { return weighted_sum(ops::matmul(x, t.constant(b)), w); }, a);
    s.check("matmul/rhs", [&](Tape& t, Var x) { return weighted_sum(ops::matmul(t.constant(a), x), w); }, b);
  }
  {
    const Tensor table = random_tensor({6, 3}, rng);
    const std::vector<int> ids{1, 4, 1, 0, 5};
    const Tensor w = weights_like({5, 3}, rng);
    s.check("embedding_lookup", [&](Tape&, Var x) { return weighted_sum(ops::embedding_lookup(x, ids), w); },
            table);
  }
  {
    const Tensor x0 = random_tensor({2, 6}, rng);
    const Tensor w = weights_like({3, 4}, rng);
    s.check("reshape", [&](Tape&, Var x) { return weighted_sum(ops::reshape(x, {3, 4}), w); }, x0);
  }
  {
    const Tensor x0 = random_tensor({5, 3}, rng);
    const Tensor w = weights_like({3}, rng);
    s.check("mean_pool", [&](Tape&, Var x) { return weighted_sum(ops::mean_pool(x, 3), w); }, x0);
    const Tensor xb = random_tensor({3, 4, 2}, rng);
    const std::vector<std::size_t> lens{4, 1, 2};
    const Tensor wb = weights_like({3, 2}, rng);
    s.check("mean_pool/batched", [&](Tape&, Var x) { return weighted_sum(ops::mean_pool(x, lens), wb); }, xb);
  }
  {
    const Tensor x0 = random_tensor({2, 6, 3}, rng);
    const Tensor f0 = random_tensor({3, 3, 4}, rng);
    const Tensor b0 = random_tensor({4}, rng, 0.2, 0.8);
    const Tensor w = weights_like({2, 4}, rng);
    s.check("conv1d_maxpool/input",
            [&](Tape& t, Var x) { return weighted_sum(ops::conv1d_maxpool(x, t.constant(f0), t.constant(b0)), w); },
            x0);
    s.check("conv1d_maxpool/filters",
            [&](Tape& t, Var f) { return weighted_sum(ops::conv1d_maxpool(t.constant(x0), f, t.constant(b0)), w); },
            f0);
    s.check("conv1d_maxpool/bias",
            [&](Tape& t, Var b) { return weighted_sum(ops::conv1d_maxpool(t.constant(x0), t.constant(f0), b), w); },
            b0);
  }
  {
    const Tensor x0 = kink_free_tensor({3, 4}, rng);
    const Tensor w = weights_like({3, 4}, rng);
    s.check("relu", [&](Tape&, Var x) { return weighted_sum(ops::relu(x), w); }, x0);
    s.check("tanh", [&](Tape&, Var x) { return weighted_sum(ops::tanh(x), w); }, x0);
    s.check("scale", [&](Tape&, Var x) { return weighted_sum(ops::scale(x, -1.7), w); }, x0);
    s.check("affine", [&](Tape&, Var x) { return weighted_sum(ops::affine(x, 0.3, 2.0), w); }, x0);
    const Tensor y0 = random_tensor({3, 4}, rng);
    s.check("add", [&](Tape& t, Var x) { return weighted_sum(ops::add(x, t.constant(y0)), w); }, x0);
    s.check("sub/lhs", [&](Tape& t, Var x) { return weighted_sum(ops::sub(x, t.constant(y0)), w); }, x0);
    s.check("sub/rhs", [&](Tape& t, Var x) { return weighted_sum(ops::sub(t.constant(y0), x), w); }, x0);
    s.check("mul", [&](Tape& t, Var x) { return weighted_sum(ops::mul(x, t.constant(y0)), w); }, x0);
    s.check("mul/square", [&](Tape&, Var x) { return weighted_sum(ops::mul(x, x), w); }, x0);
    const Tensor bias = random_tensor({4}, rng);
    s.check("add_row_bias/input", [&](Tape& t, Var x) { return weighted_sum(ops::add_row_bias(x, t.constant(bias)), w); },
            x0);
    s.check("add_row_bias/bias", [&](Tape& t, Var b) { return weighted_sum(ops::add_row_bias(t.constant(x0), b), w); },
            bias);
    s.check("sum", [&](Tape&, Var x) { return ops::scale(ops::sum(x), 0.5); }, x0);
    s.check("mean", [&](Tape&, Var x) { return ops::mean(ops::mul(x, x)); }, x0);
  }
  {
    const Tensor x0 = random_tensor({3, 2, 2}, rng);
    const Tensor s0 = random_tensor({3}, rng);
    const Tensor w = weights_like({3, 2, 2}, rng);
    s.check("scale_rows/input", [&](Tape& t, Var x) { return weighted_sum(ops::scale_rows(x, t.constant(s0)), w); }, x0);
    s.check("scale_rows/scale", [&](Tape& t, Var v) { return weighted_sum(ops::scale_rows(t.constant(x0), v), w); }, s0);
    const std::vector<std::size_t> idx{2, 0, 2};
    s.check("gather_rows", [&](Tape&, Var x) { return weighted_sum(ops::gather_rows(x, idx), w); }, x0);
  }
  {
    const Tensor a0 = random_tensor({2, 3}, rng);
    const Tensor b0 = random_tensor({2, 2}, rng);
    const Tensor w = weights_like({2, 5}, rng);
    s.check("concat_cols",
            [&](Tape& t, Var x) {
              const Var parts[2] = {t.constant(a0), x};
              return weighted_sum(ops::concat_cols(parts), w);
            },
            b0);
  }
  {
    const Tensor logits = random_tensor({4, 3}, rng, -2.0, 2.0);
    Tensor target = random_tensor({4, 3}, rng, 0.0, 1.0);
    const Tensor w = weights_like({4}, rng);
    s.check("softmax_cross_entropy",
            [&](Tape&, Var x) { return weighted_sum(ops::softmax_cross_entropy(x, target), w); }, logits);
  }

  auto add_model = [&](const std::string& prefix, Model model, const Batch& batch, const std::string& layer) {
    ModelLoss plain = [&batch](Model& m, Tape& t) {
      return ops::mean(ops::softmax_cross_entropy(forward(m, t, batch), batch.labels));
    };
    for (auto e : check_model_gradients(model, plain, options.h, options.tolerance, options.inject_sign_flip)) {
      e.name = prefix + "/" + e.name;
      s.entries.push_back(e);
    }
    std::vector<std::size_t> partner(batch.size());
    for (std::size_t r = 0; r < partner.size(); ++r) partner[r] = (r + 1) % partner.size();
    std::vector<double> lam(batch.size());
    for (double& l : lam) l = rng.uniform(0.1, 0.9);
    const Tensor y_j = permute_rows(batch.labels, partner);
    ModelLoss mixed = [&](Model& m, Tape& t) {
      const Hidden h = forward_to_layer(m, t, batch, layer);
      const Var lv = t.constant(Tensor({lam.size()}, lam));
      const Var logits = forward_from_layer(m, t, mix_hidden(h, partner, lv));
      return ops::mean(mixup_loss(logits, batch.labels, y_j, lam));
    };
    for (auto e : check_model_gradients(model, mixed, options.h, options.tolerance, options.inject_sign_flip)) {
      e.name = prefix + "/mix-" + layer + "/" + e.name;
      s.entries.push_back(e);
    }
  };
  {
    Rng init = rng.split("embed-mlp");
    const Batch batch = random_batch(4, 5, 12, 3, rng);
    add_model("embed-mlp", init_embed_mlp(12, 4, 5, 3, init), batch, std::string(kSentLayer));
  }
  {
    Rng init = rng.split("text-cnn");
    const Batch batch = random_batch(4, 6, 12, 3, rng);
    add_model("text-cnn", init_text_cnn(12, 3, {2, 3}, 3, 3, 6, 0.0, init), batch, std::string(kWordLayer));
  }

  const auto oracle = lambda_gradient_oracle({options.seed, 10, 1e-6});
  s.entries.push_back({"mixup_loss/lambda", oracle.coordinates, oracle.max_fd_error, options.tolerance,
                       oracle.max_fd_error <= options.tolerance});
  return s.entries;
}

LambdaOracleResult lambda_gradient_oracle(const LambdaOracleOptions& options) {
  Rng rng(options.seed);
  LambdaOracleResult result;
  for (std::size_t inst = 0; inst < options.instances; ++inst) {
    const bool cnn = inst % 2 == 1;
    const std::string layer(inst % 4 < 2 ? kSentLayer : kWordLayer);
    const std::size_t n = 2 + rng.uniform_index(6);
    const std::size_t classes = 2 + rng.uniform_index(4);
    const std::size_t vocab = 20;
    const std::size_t max_len = 6;
    Rng init = rng.split("instance-" + std::to_string(inst));
    Model model = cnn ? init_text_cnn(vocab, 4, {2, 3}, 3, classes, max_len, 0.0, init)
                      : init_embed_mlp(vocab, 4, 6, classes, init);
    // Sharper logits than the training init.
    for (auto& p : model.parameters()) {
      for (double& v : p.tensor.values) v *= 8.0;
    }
    const Batch batch = random_batch(n, max_len, vocab, classes, rng);

    std::vector<std::size_t> partner(n);
    do {
      for (std::size_t r = 0; r < n; ++r) partner[r] = r;
      for (std::size_t k = n; k > 1; --k) std::swap(partner[k - 1], partner[rng.uniform_index(k)]);
    } while ([&] {
      for (std::size_t r = 0; r < n; ++r) {
        if (partner[r] == r) return true;
      }
      return false;
    }());
    std::vector<double> lam(n);
    for (double& l : lam) l = rng.uniform(0.05, 0.95);
    const Tensor y_j = permute_rows(batch.labels, partner);

    std::vector<double> tape_grad;
    std::vector<double> decomposition(n);
    {
      Tape tape;
      const Hidden prefix = forward_to_layer(model, tape, batch, layer);
      const Var lv = tape.variable(Tensor({n}, lam));
      const Hidden mixed = mix_hidden(prefix, partner, lv);
      const Var logits = forward_from_layer(model, tape, mixed);
      const Var loss = mixup_loss(logits, batch.labels, y_j, lv);
      const Var wrt[2] = {lv, mixed.value};
      auto grads = tape.gradients(ops::sum(loss), wrt);
      tape_grad = grads[0];
      const Tensor g = prefix.value.value();
      const std::size_t slice = g.numel() / n;
      const Tensor ce_i = ops::softmax_cross_entropy(logits, batch.labels).value();
      const Tensor ce_j = ops::softmax_cross_entropy(logits, y_j).value();
      for (std::size_t r = 0; r < n; ++r) {
        double dot = 0.0;
        for (std::size_t k = 0; k < slice; ++k) {
          dot += grads[1][r * slice + k] * (g.values[r * slice + k] - g.values[partner[r] * slice + k]);
        }
        decomposition[r] = ce_i.values[r] - ce_j.values[r] + dot;
      }
    }
    auto sample_loss = [&](std::size_t r, double value) {
      Tape tape(GradMode::kDisabled);
      std::vector<double> probe = lam;
      probe[r] = value;
      const Var lv = tape.constant(Tensor({n}, probe));
      const Hidden prefix = forward_to_layer(model, tape, batch, layer);
      const Var logits = forward_from_layer(model, tape, mix_hidden(prefix, partner, lv));
      return mixup_loss(logits, batch.labels, y_j, lv).value().values[r];
    };
    for (std::size_t r = 0; r < n; ++r) {
      const double fd = (sample_loss(r, lam[r] + options.h) - sample_loss(r, lam[r] - options.h)) / (2.0 * options.h);
      result.max_fd_error = std::max(result.max_fd_error, relative_error(fd, tape_grad[r]));
      result.max_decomposition_error =
          std::max(result.max_decomposition_error, relative_error(decomposition[r], tape_grad[r]));
      ++result.coordinates;
    }
    ++result.instances;
  }
  return result;
}

}  // namespace amplab
