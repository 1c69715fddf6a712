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
#include "amplab/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "amplab/errors.hpp"

namespace amplab::ops {
namespace {

Tape& tape_of(Var v) {
  if (!v.tape) throw ContractError("op applied to an unbound Var");
  return *v.tape;
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + shape_str(t.shape));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape) + " vs " +
                         shape_str(b.shape));
  }
}

template <std::size_t N>
Var emit(const char* op, const std::array<Var, N>& inputs, Tensor out, BackwardFn fn) {
  return tape_of(inputs[0]).record(op, inputs, std::move(out), std::move(fn));
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank(A, 2, "matmul");
  require_rank(B, 2, "matmul");
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  if (B.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions disagree for " + shape_str(A.shape) + " x " +
                         shape_str(B.shape));
  }
  Tensor C = Tensor::zeros({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      for (std::size_t j = 0; j < n; ++j) C[i * n + j] += aip * B[p * n + j];
    }
  }
  return emit<2>("matmul", {a, b}, std::move(C), [m, k, n](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    const Tensor& A = ctx.input(0);
    const Tensor& B = ctx.input(1);
    if (ctx.needs_grad(0)) {
      auto dA = ctx.grad_in(0);  // dC * B^T
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * B[p * n + j];
          dA[i * k + p] += acc;
        }
      }
    }
    if (ctx.needs_grad(1)) {
      auto dB = ctx.grad_in(1);  // A^T * dC
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A[i * k + p];
          for (std::size_t j = 0; j < n; ++j) dB[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

Var embedding_lookup(Var table, std::span<const int> ids) {
  const Tensor& T = table.value();
  require_rank(T, 2, "embedding_lookup");
  const std::size_t vocab = T.dim(0), d = T.dim(1);
  std::vector<int> rows(ids.begin(), ids.end());
  Tensor out = Tensor::zeros({rows.size(), d});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || static_cast<std::size_t>(rows[r]) >= vocab) {
      throw IndexError("embedding_lookup: id " + std::to_string(rows[r]) +
                       " outside vocabulary of size " + std::to_string(vocab));
    }
    std::copy_n(T.values.begin() + static_cast<std::ptrdiff_t>(rows[r] * d), d,
                out.values.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  return emit<1>("embedding_lookup", {table}, std::move(out),
                 [rows = std::move(rows), d](const BackwardContext& ctx) {
                   const auto g = ctx.grad_out();
                   auto dT = ctx.grad_in(0);
                   for (std::size_t r = 0; r < rows.size(); ++r) {
                     const std::size_t base = static_cast<std::size_t>(rows[r]) * d;
                     for (std::size_t e = 0; e < d; ++e) dT[base + e] += g[r * d + e];
                   }
                 });
}

Var reshape(Var x, Shape shape) {
  const Tensor& X = x.value();
  if (shape_numel(shape) != X.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(X.shape) + " as " + shape_str(shape));
  }
  Tensor out(std::move(shape), X.values);
  return emit<1>("reshape", {x}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    auto dx = ctx.grad_in(0);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

Var mean_pool(Var x, std::size_t valid_len) {
  const Tensor& X = x.value();
  require_rank(X, 2, "mean_pool");
  const std::size_t len = X.dim(0), d = X.dim(1);
  const std::size_t lens[1] = {valid_len};
  Var pooled = mean_pool(reshape(x, {1, len, d}), lens);
  return reshape(pooled, {d});
}

Var mean_pool(Var x, std::span<const std::size_t> valid_lens) {
  const Tensor& X = x.value();
  require_rank(X, 3, "mean_pool");
  const std::size_t n = X.dim(0), len = X.dim(1), d = X.dim(2);
  if (valid_lens.size() != n) {
    throw DimensionError("mean_pool: " + std::to_string(valid_lens.size()) +
                         " valid lengths for batch of " + std::to_string(n));
  }
  std::vector<std::size_t> lens(valid_lens.begin(), valid_lens.end());
  Tensor out = Tensor::zeros({n, d});
  for (std::size_t s = 0; s < n; ++s) {
    if (lens[s] == 0 || lens[s] > len) {
      throw ContractError("mean_pool: valid_len " + std::to_string(lens[s]) +
                          " outside [1, " + std::to_string(len) + "]");
    }
    const double inv = 1.0 / static_cast<double>(lens[s]);
    for (std::size_t t = 0; t < lens[s]; ++t) {
      for (std::size_t e = 0; e < d; ++e) out[s * d + e] += X[(s * len + t) * d + e];
    }
    for (std::size_t e = 0; e < d; ++e) out[s * d + e] *= inv;
  }
  return emit<1>("mean_pool", {x}, std::move(out),
                 [lens = std::move(lens), len, d](const BackwardContext& ctx) {
                   const auto g = ctx.grad_out();
                   auto dx = ctx.grad_in(0);
                   for (std::size_t s = 0; s < lens.size(); ++s) {
                     const double inv = 1.0 / static_cast<double>(lens[s]);
                     for (std::size_t t = 0; t < lens[s]; ++t) {
                       for (std::size_t e = 0; e < d; ++e) {
                         dx[(s * len + t) * d + e] += g[s * d + e] * inv;
                       }
                     }
                   }
                 });
}

Var conv1d_maxpool(Var x, Var filters, Var bias) {
  const Tensor& X0 = x.value();
  if (X0.rank() == 2) {
    Var batched = conv1d_maxpool(reshape(x, {1, X0.dim(0), X0.dim(1)}), filters, bias);
    return reshape(batched, {batched.value().dim(1)});
  }
  const Tensor& X = X0;
  const Tensor& F = filters.value();
  const Tensor& B = bias.value();
  require_rank(X, 3, "conv1d_maxpool");
  require_rank(F, 3, "conv1d_maxpool filters");
  require_rank(B, 1, "conv1d_maxpool bias");
  const std::size_t n = X.dim(0), len = X.dim(1), d = X.dim(2);
  const std::size_t w = F.dim(0), c = F.dim(2);
  if (F.dim(1) != d || B.dim(0) != c) {
    throw DimensionError("conv1d_maxpool: input " + shape_str(X.shape) + " incompatible with filters " +
                         shape_str(F.shape) + " and bias " + shape_str(B.shape));
  }
  if (len < w) {
    throw InputTooShortError("conv1d_maxpool: sequence length " + std::to_string(len) +
                             " shorter than filter width " + std::to_string(w));
  }
  const std::size_t positions = len - w + 1;
  Tensor out = Tensor::zeros({n, c});
  std::vector<std::size_t> argmax(n * c, 0);
  std::vector<double> pre(positions * c);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(pre.begin(), pre.end(), 0.0);
    for (std::size_t t = 0; t < positions; ++t) {
      for (std::size_t o = 0; o < w; ++o) {
        for (std::size_t e = 0; e < d; ++e) {
          const double xv = X[(s * len + t + o) * d + e];
          const std::size_t fbase = (o * d + e) * c;
          for (std::size_t ch = 0; ch < c; ++ch) pre[t * c + ch] += xv * F[fbase + ch];
        }
      }
    }
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < positions; ++t) {
        if (pre[t * c + ch] > pre[best * c + ch]) best = t;
      }
      argmax[s * c + ch] = best;
      const double v = pre[best * c + ch] + B[ch];
      out[s * c + ch] = v > 0.0 ? v : 0.0;
    }
  }
  return emit<3>("conv1d_maxpool", {x, filters, bias}, std::move(out),
                 [argmax = std::move(argmax), n, len, d, w, c](const BackwardContext& ctx) {
                   const auto g = ctx.grad_out();
                   const Tensor& X = ctx.input(0);
                   const Tensor& F = ctx.input(1);
                   const Tensor& Y = ctx.output();
                   for (std::size_t s = 0; s < n; ++s) {
                     for (std::size_t ch = 0; ch < c; ++ch) {
                       const std::size_t idx = s * c + ch;
                       if (!(Y[idx] > 0.0)) continue;
                       const double gv = g[idx];
                       const std::size_t t = argmax[idx];
                       if (ctx.needs_grad(2)) ctx.grad_in(2)[ch] += gv;
                       for (std::size_t o = 0; o < w; ++o) {
                         for (std::size_t e = 0; e < d; ++e) {
                           const std::size_t xi = (s * len + t + o) * d + e;
                           const std::size_t fi = (o * d + e) * c + ch;
                           if (ctx.needs_grad(1)) ctx.grad_in(1)[fi] += gv * X[xi];
                           if (ctx.needs_grad(0)) ctx.grad_in(0)[xi] += gv * F[fi];
                         }
                       }
                     }
                   }
                 });
}

Var relu(Var x) {
  const Tensor& X = x.value();
  Tensor out(X.shape, X.values);
  for (double& v : out.values) v = v > 0.0 ? v : 0.0;
  return emit<1>("relu", {x}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    const Tensor& X = ctx.input(0);
    auto dx = ctx.grad_in(0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (X[i] > 0.0) dx[i] += g[i];
    }
  });
}

Var tanh(Var x) {
  const Tensor& X = x.value();
  Tensor out(X.shape, X.values);
  for (double& v : out.values) v = std::tanh(v);
  return emit<1>("tanh", {x}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    const Tensor& Y = ctx.output();
    auto dx = ctx.grad_in(0);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (1.0 - Y[i] * Y[i]);
  });
}

Var add(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_same_shape(A, B, "add");
  Tensor out(A.shape, A.values);
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += B[i];
  return emit<2>("add", {a, b}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    for (std::size_t k = 0; k < 2; ++k) {
      if (!ctx.needs_grad(k)) continue;
      auto d = ctx.grad_in(k);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
  });
}

Var sub(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_same_shape(A, B, "sub");
  Tensor out(A.shape, A.values);
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= B[i];
  return emit<2>("sub", {a, b}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    if (ctx.needs_grad(0)) {
      auto d = ctx.grad_in(0);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
    if (ctx.needs_grad(1)) {
      auto d = ctx.grad_in(1);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_same_shape(A, B, "mul");
  Tensor out(A.shape, A.values);
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= B[i];
  return emit<2>("mul", {a, b}, std::move(out), [](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    const Tensor& A = ctx.input(0);
    const Tensor& B = ctx.input(1);
    if (ctx.needs_grad(0)) {
      auto d = ctx.grad_in(0);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * B[i];
    }
    if (ctx.needs_grad(1)) {
      auto d = ctx.grad_in(1);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * A[i];
    }
  });
}

Var scale(Var x, double factor) { return affine(x, factor, 0.0); }

Var affine(Var x, double a, double b) {
  const Tensor& X = x.value();
  Tensor out(X.shape, X.values);
  for (double& v : out.values) v = a * v + b;
  return emit<1>("affine", {x}, std::move(out), [a](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    auto dx = ctx.grad_in(0);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += a * g[i];
  });
}

Var add_row_bias(Var x, Var bias) {
  const Tensor& X = x.value();
  const Tensor& B = bias.value();
  require_rank(X, 2, "add_row_bias");
  require_rank(B, 1, "add_row_bias bias");
  const std::size_t n = X.dim(0), m = X.dim(1);
  if (B.dim(0) != m) {
    throw DimensionError("add_row_bias: " + shape_str(X.shape) + " with bias " + shape_str(B.shape));
  }
  Tensor out(X.shape, X.values);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) out[r * m + j] += B[j];
  }
  return emit<2>("add_row_bias", {x, bias}, std::move(out), [n, m](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    if (ctx.needs_grad(0)) {
      auto dx = ctx.grad_in(0);
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
    }
    if (ctx.needs_grad(1)) {
      auto db = ctx.grad_in(1);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) db[j] += g[r * m + j];
      }
    }
  });
}

Var scale_rows(Var x, Var s) {
  const Tensor& X = x.value();
  const Tensor& S = s.value();
  require_rank(S, 1, "scale_rows scale");
  if (X.rank() == 0 || X.dim(0) != S.dim(0)) {
    throw DimensionError("scale_rows: " + shape_str(X.shape) + " with scale " + shape_str(S.shape));
  }
  const std::size_t n = X.dim(0), stride = X.numel() / std::max<std::size_t>(n, 1);
  Tensor out(X.shape, X.values);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < stride; ++j) out[r * stride + j] *= S[r];
  }
  return emit<2>("scale_rows", {x, s}, std::move(out), [n, stride](const BackwardContext& ctx) {
    const auto g = ctx.grad_out();
    const Tensor& X = ctx.input(0);
    const Tensor& S = ctx.input(1);
    if (ctx.needs_grad(0)) {
      auto dx = ctx.grad_in(0);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < stride; ++j) dx[r * stride + j] += g[r * stride + j] * S[r];
      }
    }
    if (ctx.needs_grad(1)) {
      auto ds = ctx.grad_in(1);
      for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < stride; ++j) acc += g[r * stride + j] * X[r * stride + j];
        ds[r] += acc;
      }
    }
  });
}

Var gather_rows(Var x, std::span<const std::size_t> index) {
  const Tensor& X = x.value();
  if (X.rank() == 0) throw DimensionError("gather_rows: scalar input");
  const std::size_t n = X.dim(0), stride = X.numel() / std::max<std::size_t>(n, 1);
  std::vector<std::size_t> idx(index.begin(), index.end());
  Shape shape = X.shape;
  shape[0] = idx.size();
  Tensor out = Tensor::zeros(shape);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] >= n) {
      throw IndexError("gather_rows: row " + std::to_string(idx[r]) + " of " + std::to_string(n));
    }
    std::copy_n(X.values.begin() + static_cast<std::ptrdiff_t>(idx[r] * stride), stride,
                out.values.begin() + static_cast<std::ptrdiff_t>(r * stride));
  }
  return emit<1>("gather_rows", {x}, std::move(out),
                 [idx = std::move(idx), stride](const BackwardContext& ctx) {
                   const auto g = ctx.grad_out();
                   auto dx = ctx.grad_in(0);
                   for (std::size_t r = 0; r < idx.size(); ++r) {
                     for (std::size_t j = 0; j < stride; ++j) {
                       dx[idx[r] * stride + j] += g[r * stride + j];
                     }
                   }
                 });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  Tape& tape = tape_of(parts[0]);
  const std::size_t n = parts[0].value().dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& P = p.value();
    require_rank(P, 2, "concat_cols");
    if (P.dim(0) != n) {
      throw DimensionError("concat_cols: row count " + std::to_string(P.dim(0)) + " vs " +
                           std::to_string(n));
    }
    widths.push_back(P.dim(1));
    total += P.dim(1);
  }
  Tensor out = Tensor::zeros({n, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& P = parts[k].value();
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < widths[k]; ++j) out[r * total + offset + j] = P[r * widths[k] + j];
    }
    offset += widths[k];
  }
  return tape.record("concat_cols", parts, std::move(out),
                     [widths = std::move(widths), n, total](const BackwardContext& ctx) {
                       const auto g = ctx.grad_out();
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < widths.size(); ++k) {
                         if (ctx.needs_grad(k)) {
                           auto d = ctx.grad_in(k);
                           for (std::size_t r = 0; r < n; ++r) {
                             for (std::size_t j = 0; j < widths[k]; ++j) {
                               d[r * widths[k] + j] += g[r * total + offset + j];
                             }
                           }
                         }
                         offset += widths[k];
                       }
                     });
}

Var softmax_cross_entropy(Var logits, const Tensor& target) {
  const Tensor& Z = logits.value();
  require_rank(Z, 2, "softmax_cross_entropy");
  const std::size_t n = Z.dim(0), c = Z.dim(1);
  if (c < 2) {
    throw ConfigError("softmax_cross_entropy: need at least 2 classes, got " + std::to_string(c));
  }
  if (target.shape != Z.shape) {
    throw DimensionError("softmax_cross_entropy: logits " + shape_str(Z.shape) + " vs target " +
                         shape_str(target.shape));
  }
  // Softmax rows are kept for the backward rule.
  std::vector<double> probs(n * c);
  std::vector<double> target_sums(n, 0.0);
  Tensor out = Tensor::zeros({n});
  for (std::size_t r = 0; r < n; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) mx = std::max(mx, Z[r * c + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(Z[r * c + j] - mx);
    const double log_z = std::log(z);
    double loss = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double shifted = Z[r * c + j] - mx;
      probs[r * c + j] = std::exp(shifted - log_z);
      const double t = target[r * c + j];
      if (t != 0.0) loss -= t * (shifted - log_z);
      target_sums[r] += t;
    }
    out[r] = loss;
  }
  Tensor tgt = target;
  return emit<1>("softmax_cross_entropy", {logits}, std::move(out),
                 [probs = std::move(probs), sums = std::move(target_sums), tgt = std::move(tgt), n,
                  c](const BackwardContext& ctx) {
                   const auto g = ctx.grad_out();
                   auto dz = ctx.grad_in(0);
                   for (std::size_t r = 0; r < n; ++r) {
                     for (std::size_t j = 0; j < c; ++j) {
                       const std::size_t i = r * c + j;
                       dz[i] += g[r] * (probs[i] * sums[r] - tgt[i]);
                     }
                   }
                 });
}

Var sum(Var x) {
  const Tensor& X = x.value();
  double acc = 0.0;
  for (double v : X.values) acc += v;
  return emit<1>("sum", {x}, Tensor::scalar(acc), [](const BackwardContext& ctx) {
    const double g = ctx.grad_out()[0];
    for (double& d : ctx.grad_in(0)) d += g;
  });
}

Var mean(Var x) {
  const Tensor& X = x.value();
  if (X.numel() == 0) throw DimensionError("mean: empty tensor");
  double acc = 0.0;
  for (double v : X.values) acc += v;
  const double inv = 1.0 / static_cast<double>(X.numel());
  return emit<1>("mean", {x}, Tensor::scalar(acc * inv), [inv](const BackwardContext& ctx) {
    const double g = ctx.grad_out()[0] * inv;
    for (double& d : ctx.grad_in(0)) d += g;
  });
}

}  // namespace amplab::ops
