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

#include <cstdint>
#include <random>
#include <string_view>

namespace amplab {

/// Deterministic random stream. Every distribution is implemented here on top
/// of raw 64-bit draws so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent named substream derived from this stream's seed (not its
  /// state), so adding draws to one stream never shifts another.
  Rng split(std::string_view name) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n);
  double normal();
  /// Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);
  /// Beta(a, b) as G_a / (G_a + G_b).
  double beta(double a, double b);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace amplab
