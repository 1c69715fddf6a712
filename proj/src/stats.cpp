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
#include "amplab/stats.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "amplab/errors.hpp"

namespace amplab::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ConfigError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double relative_improvement(double base, double ours) {
  if (base == 0.0) throw ConfigError("relative improvement against a zero baseline");
  return (base - ours) / base * 100.0;
}

double round_to(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  // Values stored just below a half round up.
  const double scaled = value * scale;
  const double nudged = scaled + std::copysign(1e-9 * std::max(1.0, std::fabs(scaled)), scaled);
  return std::round(nudged) / scale;
}

WilcoxonResult wilcoxon_signed_rank_greater(std::span<const double> differences) {
  std::vector<double> d;
  for (double x : differences) {
    if (x != 0.0) d.push_back(x);
  }
  WilcoxonResult r;
  r.n_used = d.size();
  if (d.empty()) return r;

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
  std::vector<double> rank(d.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] > 0.0) r.w_plus += rank[k];
  }

  const std::size_t m = d.size();
  if (m <= 25) {
    // Ranks are multiples of 0.5; count sign assignments by doubled rank sum.
    std::vector<int> twice(m);
    int total = 0;
    for (std::size_t k = 0; k < m; ++k) {
      twice[k] = static_cast<int>(std::lround(rank[k] * 2.0));
      total += twice[k];
    }
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    for (int t : twice) {
      for (int s = total; s >= t; --s) ways[s] += ways[s - t];
    }
    const int observed = static_cast<int>(std::lround(r.w_plus * 2.0));
    double tail = 0.0;
    for (int s = observed; s <= total; ++s) tail += ways[s];
    r.p_value = tail / std::ldexp(1.0, static_cast<int>(m));
    r.exact = true;
  } else {
    double var = 0.0;
    for (double rk : rank) var += rk * rk;
    var /= 4.0;
    const double mu = static_cast<double>(m) * static_cast<double>(m + 1) / 4.0;
    const double z = (r.w_plus - mu - 0.5) / std::sqrt(var);
    r.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    r.exact = false;
  }
  return r;
}

double kolmogorov_p_value(double statistic, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

}  // namespace amplab::stats
