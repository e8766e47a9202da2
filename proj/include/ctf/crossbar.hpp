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

#include "ctf/device_model.hpp"
#include "ctf/random.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ctf {

struct SynapsePair {
  double g1;
  double g2;
};

enum class UpdateCycle {
  positive, // coincidences potentiate g1 (delta < 0) or g2 (delta > 0)
  negative, // coincidences depress g2 (delta < 0) or g1 (delta > 0)
};

/// Stochastic pulse-train parameters for one update.
struct PulsePlan {
  int train_length = 10;    // PL
  double input_scale = 1.0; // C
  UpdateCycle cycle = UpdateCycle::positive;
};

struct UpdateStats {
  std::uint64_t coincidences = 0;
  std::uint64_t probability_clips = 0; // entries with C*|v| > 1
  std::uint64_t saturations = 0;       // pulses clamped at a window edge

  UpdateStats &operator+=(const UpdateStats &o) {
    coincidences += o.coincidences;
    probability_clips += o.probability_clips;
    saturations += o.saturations;
    return *this;
  }
};

/// C = sqrt(alpha / (PL * delta_potentiate(g_center) * k)).
///
/// With this C the expected weight change of one update is -alpha * delta * x
/// near the centre conductance. alpha == 0 yields C == 0.
double compute_input_scale(double alpha, int train_length, double k, const DeviceModel &device);

/// Signed weights held as conductance pairs, w = k * (g1 - g2).
///
/// Row i drives output i; column j takes input j, so forward computes W x.
/// A cached copy of W is kept in sync with the pairs; reads never touch the
/// conductances. Single writer: updates must not overlap reads.
class CrossbarArray {
public:
  CrossbarArray(std::size_t rows, std::size_t cols, double k,
                std::shared_ptr<const DeviceModel> device);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double k() const { return k_; }
  const DeviceModel &device() const { return *device_; }
  const std::shared_ptr<const DeviceModel> &device_ptr() const { return device_; }

  SynapsePair pair(std::size_t r, std::size_t c) const {
    return {g1_[r * cols_ + c], g2_[r * cols_ + c]};
  }
  void set_pair(std::size_t r, std::size_t c, SynapsePair p); // DomainError outside window

  std::span<const double> g1() const { return g1_; }
  std::span<const double> g2() const { return g2_; }

  /// Row-major view of k * (g1 - g2).
  std::span<const double> weights() const { return w_; }
  /// Fresh computation of k * (g1 - g2) from the conductances.
  std::vector<double> read_weights() const;

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, std::span<double> y) const;
  std::vector<double> backward(std::span<const double> delta) const;
  void backward(std::span<const double> delta, std::span<double> out) const;

  /// Pulse-train coincidence update.
  ///
  /// For every cross-point, independent trains X_1..X_PL ~ Bernoulli(min(1, C x_j))
  /// and D_1..D_PL ~ Bernoulli(min(1, C |delta_i|)) are drawn; each coincidence
  /// applies one device pulse routed by the sign of delta_i and the cycle.
  /// Requires x >= 0; checked before anything is modified.
  UpdateStats stochastic_update(std::span<const double> x, std::span<const double> delta,
                                const PulsePlan &plan, RandomStream &rng);

  /// Fraction of the 2*rows*cols devices sitting on a window edge.
  double saturation_fraction() const;

  void save(const std::filesystem::path &path) const;
  static CrossbarArray load(const std::filesystem::path &path,
                            std::shared_ptr<const DeviceModel> device);

private:
  void refresh(std::size_t idx) { w_[idx] = k_ * (g1_[idx] - g2_[idx]); }
  void apply_coincidences(std::size_t idx, std::uint32_t count, bool negative_delta,
                          UpdateCycle cycle, RandomStream &rng, UpdateStats &stats);

  std::size_t rows_;
  std::size_t cols_;
  double k_;
  std::shared_ptr<const DeviceModel> device_;
  std::vector<double> g1_;
  std::vector<double> g2_;
  std::vector<double> w_;
  std::vector<std::uint32_t> active_; // scratch: columns with x > 0
  std::vector<double> col_prob_;      // scratch
};

using WeightSampler = std::function<double(RandomStream &)>;

/// U(-sqrt(6/fan_in), +sqrt(6/fan_in)).
WeightSampler kaiming_uniform(std::size_t fan_in);

/// Places each sampled w0 as g1 = c + w0/(2k), g2 = c - w0/(2k) around g_center.
/// Throws InitializationError when |w0|/(2k) does not fit in the window.
CrossbarArray initialize(std::size_t rows, std::size_t cols, double k,
                         std::shared_ptr<const DeviceModel> device, const WeightSampler &w0,
                         RandomStream &rng);

} // namespace ctf
