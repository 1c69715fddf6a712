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
#include <span>

namespace amplab::stats {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> xs);

/// (base - ours) / base * 100. Throws ConfigError when base is 0.
double relative_improvement(double base, double ours);

/// Rounds half away from zero to `digits` decimals.
double round_to(double value, int digits);

struct WilcoxonResult {
  double w_plus = 0.0;       // rank sum of positive differences
  std::size_t n_used = 0;    // non-zero differences
  double p_value = 1.0;      // P(W+ >= observed) under the null
  bool exact = true;
};

/// One-sided signed-rank test that the differences are shifted above zero.
/// Zero differences are dropped, tied magnitudes get average ranks. Exact
/// enumeration up to 25 non-zero differences, normal approximation beyond.
WilcoxonResult wilcoxon_signed_rank_greater(std::span<const double> differences);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov-Smirnov test of samples against a continuous CDF.
template <typename Cdf>
KsResult ks_test(std::span<const double> samples, Cdf cdf);

/// Asymptotic Kolmogorov p-value with the small-sample correction.
double kolmogorov_p_value(double statistic, std::size_t n);

/// Regularized incomplete beta function I_x(a, b).
double beta_cdf(double x, double a, double b);

}  // namespace amplab::stats

#include <algorithm>
#include <vector>

namespace amplab::stats {

template <typename Cdf>
KsResult ks_test(std::span<const double> samples, Cdf cdf) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_p_value(d, sorted.size())};
}

}  // namespace amplab::stats
