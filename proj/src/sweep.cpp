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
#include "amplab/sweep.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "amplab/errors.hpp"
#include "amplab/mixup.hpp"
#include "amplab/ops.hpp"
#include "amplab/rng.hpp"

namespace amplab {
namespace {

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::vector<double> mixed_losses_in_place(Model& model, const Batch& batch,
                                          std::span<const std::size_t> partner, std::string_view layer,
                                          double lambda) {
  const std::size_t n = batch.size();
  if (partner.size() != n) throw DimensionError("mixed_losses: partner count differs from batch");
  Tape tape(GradMode::kDisabled);
  const std::vector<double> lam(n, lambda);
  const Var lambda_var = tape.constant(Tensor({n}, lam));
  const Hidden prefix = forward_to_layer(model, tape, batch, layer);
  const Hidden mixed = mix_hidden(prefix, partner, lambda_var);
  const Var logits = forward_from_layer(model, tape, mixed);
  const Tensor y_j = permute_rows(batch.labels, partner);
  return mixup_loss(logits, batch.labels, y_j, lam).value().values;
}

}  // namespace

std::vector<double> mixed_losses(const Model& model, const Batch& batch,
                                 std::span<const std::size_t> partner, std::string_view layer,
                                 double lambda) {
  Model local = model;
  return mixed_losses_in_place(local, batch, partner, layer, lambda);
}

std::vector<SweepRow> lambda_sweep(const Model& model_a, const Model& model_b, const Dataset& test,
                                   const Vocab& vocab, const SweepOptions& options) {
  if (model_a.vocab_size() != vocab.size() || model_b.vocab_size() != vocab.size()) {
    throw ConfigError("lambda_sweep: models were trained with a different vocabulary");
  }
  if (model_a.num_classes() != model_b.num_classes()) {
    throw ConfigError("lambda_sweep: models disagree on the number of classes");
  }
  if (!model_a.has_layer(options.layer) || !model_b.has_layer(options.layer)) {
    throw ConfigError("lambda_sweep: unknown layer " + options.layer);
  }
  if (options.grid_points < 2) throw ConfigError("lambda_sweep: need at least 2 grid points");
  if (test.examples.empty()) throw ConfigError("lambda_sweep: empty test set");

  std::vector<Example> rows;
  std::vector<std::size_t> partner;
  if (options.single_pair) {
    const auto [i, j] = *options.single_pair;
    if (i >= test.size() || j >= test.size()) throw IndexError("lambda_sweep: pair index out of range");
    rows = {test.examples[i], test.examples[j]};
    partner = {1, 0};
  } else {
    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(options.pair_seed);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.uniform_index(k)]);
    for (std::size_t idx : order) rows.push_back(test.examples[idx]);
    partner.resize(rows.size());
    for (std::size_t p = 0; p < rows.size(); ++p) partner[p] = rows.size() - 1 - p;
  }
  const std::size_t len =
      std::max({options.max_len, model_a.min_len(), model_b.min_len()});
  const Batch batch = encode_batch(rows, vocab, len, model_a.num_classes());
  const std::size_t scored = options.single_pair ? 1 : rows.size();

  Model a = model_a;
  Model b = model_b;
  std::vector<SweepRow> out;
  for (std::size_t k = 0; k < options.grid_points; ++k) {
    const double lambda = static_cast<double>(k) / static_cast<double>(options.grid_points - 1);
    const auto la = mixed_losses_in_place(a, batch, partner, options.layer, lambda);
    const auto lb = mixed_losses_in_place(b, batch, partner, options.layer, lambda);
    SweepRow row{lambda, 0.0, 0.0};
    for (std::size_t r = 0; r < scored; ++r) {
      row.loss_a += la[r];
      row.loss_b += lb[r];
    }
    row.loss_a /= static_cast<double>(scored);
    row.loss_b /= static_cast<double>(scored);
    out.push_back(row);
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "lambda,loss_model_a,loss_model_b\n";
  for (const auto& r : rows) out += fmt(r.lambda, 4) + "," + fmt(r.loss_a, 8) + "," + fmt(r.loss_b, 8) + "\n";
  return out;
}

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& label_a,
                      const std::string& label_b) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : rows) {
    lo = std::min({lo, r.loss_a, r.loss_b});
    hi = std::max({hi, r.loss_a, r.loss_b});
  }
  if (rows.empty()) lo = 0.0, hi = 1.0;
  if (hi <= lo) hi = lo + 1.0;
  auto x = [&](double lambda) { return kPad + lambda * (kW - 2 * kPad); };
  auto y = [&](double loss) { return kH - kPad - (loss - lo) / (hi - lo) * (kH - 2 * kPad); };
  auto path = [&](bool first) {
    std::string d;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      d += (k ? " L" : "M") + fmt(x(rows[k].lambda), 2) + "," + fmt(y(first ? rows[k].loss_a : rows[k].loss_b), 2);
    }
    return d;
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\"" << kH - kPad
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
     << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">lambda</text>\n"
     << "<text x=\"" << kPad << "\" y=\"" << kPad - 10 << "\">loss " << fmt(lo, 3) << " .. " << fmt(hi, 3)
     << "</text>\n"
     << "<path d=\"" << path(true) << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n"
     << "<path d=\"" << path(false) << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n"
     << "<text x=\"" << kW - kPad - 150 << "\" y=\"" << kPad << "\" fill=\"#1f77b4\">" << label_a << "</text>\n"
     << "<text x=\"" << kW - kPad - 150 << "\" y=\"" << kPad + 18 << "\" fill=\"#d62728\">" << label_b
     << "</text>\n"
     << "</svg>\n";
  return os.str();
}

}  // namespace amplab
