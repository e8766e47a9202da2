/*
 * Copyright 2026 The ctfsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ctf {

/// Caller-owned deterministic random stream.
///
/// Every stochastic draw in the simulator goes through one of these. The
/// engine and the cached normal deviate are both part of the state, so two
/// streams built from the same seed produce identical sequences.
class RandomStream {
public:
  using Engine = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  /// Seeds from a parent seed plus stream tags (e.g. repetition, purpose).
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  double uniform() { return unit_(engine_); } // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); } // N(0, 1)
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  Engine &engine() { return engine_; }

private:
  Engine engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives an independent 64-bit seed from a parent seed and tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

} // namespace ctf
