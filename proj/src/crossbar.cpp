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
#include "ctf/crossbar.hpp"

#include "binary_io.hpp"
#include "ctf/errors.hpp"
#include "ctf/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ctf {

namespace {

constexpr char kSnapshotMagic[5] = "CTFX";
constexpr std::uint32_t kSnapshotVersion = 1;

void check_size(std::size_t got, std::size_t want, const char *what) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": expected length " << want << ", got " << got;
    throw PreconditionError(os.str());
  }
}

} // namespace

double compute_input_scale(double alpha, int train_length, double k, const DeviceModel &device) {
  if (!(alpha >= 0.0) || train_length < 1 || !(k > 0.0)) {
    throw PreconditionError("compute_input_scale: need alpha >= 0, PL >= 1, k > 0");
  }
  return std::sqrt(alpha / (train_length * device.delta_potentiate(device.g_center()) * k));
}

CrossbarArray::CrossbarArray(std::size_t rows, std::size_t cols, double k,
                             std::shared_ptr<const DeviceModel> device)
    : rows_(rows), cols_(cols), k_(k), device_(std::move(device)) {
  if (rows == 0 || cols == 0) {
    throw PreconditionError("crossbar: dimensions must be >= 1");
  }
  if (!(k > 0.0)) {
    throw PreconditionError("crossbar: k must be > 0");
  }
  if (!device_) {
    throw PreconditionError("crossbar: null device model");
  }
  g1_.assign(rows * cols, device_->g_center());
  g2_.assign(rows * cols, device_->g_center());
  w_.assign(rows * cols, 0.0);
}

void CrossbarArray::set_pair(std::size_t r, std::size_t c, SynapsePair p) {
  if (!device_->contains(p.g1) || !device_->contains(p.g2)) {
    throw DomainError("crossbar: synapse conductance outside device window");
  }
  const std::size_t idx = r * cols_ + c;
  g1_[idx] = p.g1;
  g2_[idx] = p.g2;
  refresh(idx);
}

std::vector<double> CrossbarArray::read_weights() const {
  std::vector<double> w(rows_ * cols_);
  simd::scaled_difference(k_, g1_, g2_, w);
  return w;
}

std::vector<double> CrossbarArray::forward(std::span<const double> x) const {
  std::vector<double> y(rows_);
  forward(x, y);
  return y;
}

void CrossbarArray::forward(std::span<const double> x, std::span<double> y) const {
  check_size(x.size(), cols_, "crossbar forward input");
  check_size(y.size(), rows_, "crossbar forward output");
  simd::matvec(w_, rows_, cols_, x, y);
}

std::vector<double> CrossbarArray::backward(std::span<const double> delta) const {
  std::vector<double> out(cols_);
  backward(delta, out);
  return out;
}

void CrossbarArray::backward(std::span<const double> delta, std::span<double> out) const {
  check_size(delta.size(), rows_, "crossbar backward input");
  check_size(out.size(), cols_, "crossbar backward output");
  simd::matvec_transposed(w_, rows_, cols_, delta, out);
}

void CrossbarArray::apply_coincidences(std::size_t idx, std::uint32_t count, bool negative_delta,
                                       UpdateCycle cycle, RandomStream &rng, UpdateStats &stats) {
  // Positive cycle raises g1 for delta < 0 (w grows) and g2 otherwise; the
  // negative cycle reaches the same sign of dw by lowering the other device.
  const bool positive = cycle == UpdateCycle::positive;
  const bool touch_g1 = positive ? negative_delta : !negative_delta;
  const PulseDirection dir = positive ? PulseDirection::potentiate : PulseDirection::depress;
  double &g = touch_g1 ? g1_[idx] : g2_[idx];
  for (std::uint32_t n = 0; n < count; ++n) {
    const PulseOutcome out = device_->pulse(g, dir, rng);
    g = out.g;
    stats.saturations += out.saturated ? 1 : 0;
  }
  stats.coincidences += count;
  refresh(idx);
}

UpdateStats CrossbarArray::stochastic_update(std::span<const double> x,
                                             std::span<const double> delta, const PulsePlan &plan,
                                             RandomStream &rng) {
  check_size(x.size(), cols_, "stochastic_update input");
  check_size(delta.size(), rows_, "stochastic_update delta");
  if (plan.train_length < 1 || !(plan.input_scale >= 0.0)) {
    throw PreconditionError("stochastic_update: invalid pulse plan");
  }
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw PreconditionError("stochastic_update: inputs must be finite and non-negative");
    }
  }
  for (double d : delta) {
    if (!std::isfinite(d)) {
      throw PreconditionError("stochastic_update: non-finite gradient");
    }
  }

  UpdateStats stats;
  const double scale = plan.input_scale;
  const std::uint64_t pl = static_cast<std::uint64_t>(plan.train_length);

  active_.clear();
  col_prob_.clear();
  double p_col_max = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    const double p = scale * x[j];
    if (p <= 0.0) {
      continue;
    }
    if (p > 1.0) {
      ++stats.probability_clips;
    }
    active_.push_back(static_cast<std::uint32_t>(j));
    col_prob_.push_back(std::min(1.0, p));
    p_col_max = std::max(p_col_max, col_prob_.back());
  }
  if (active_.empty()) {
    for (double d : delta) {
      stats.probability_clips += scale * std::abs(d) > 1.0 ? 1 : 0;
    }
    return stats;
  }

  // X_n and D_n are independent per cross-point, so each of the PL slots of
  // cross-point (i, j) is a coincidence with probability p_i * p_j. Scan the
  // row's PL * |active| slots by geometric skips at the envelope rate
  // p_i * max_j p_j and thin each candidate down to its own column rate.
  // This samples exactly the same law as drawing every train bit.
  const std::uint64_t slots = pl * active_.size();
  for (std::size_t i = 0; i < rows_; ++i) {
    const double p_row_raw = scale * std::abs(delta[i]);
    if (p_row_raw <= 0.0) {
      continue;
    }
    if (p_row_raw > 1.0) {
      ++stats.probability_clips;
    }
    const double p_row = std::min(1.0, p_row_raw);
    const double envelope = p_row * p_col_max;
    const double log_miss = envelope < 1.0 ? std::log1p(-envelope) : 0.0;
    const bool negative_delta = delta[i] < 0.0;

    std::uint64_t slot = 0;
    std::size_t current = active_.size(); // column whose hits are being counted
    std::uint32_t hits = 0;
    while (true) {
      if (envelope < 1.0) {
        const double u = 1.0 - rng.uniform(); // (0, 1]
        const double skip = std::floor(std::log(u) / log_miss);
        if (skip >= static_cast<double>(slots - slot)) {
          break;
        }
        slot += static_cast<std::uint64_t>(skip);
      }
      if (slot >= slots) {
        break;
      }
      const std::size_t a = static_cast<std::size_t>(slot / pl);
      const double keep = col_prob_[a] / p_col_max;
      if (keep >= 1.0 || rng.uniform() < keep) {
        if (a != current) {
          if (hits > 0) {
            apply_coincidences(i * cols_ + active_[current], hits, negative_delta, plan.cycle, rng,
                               stats);
          }
          current = a;
          hits = 0;
        }
        ++hits;
      }
      ++slot;
    }
    if (hits > 0) {
      apply_coincidences(i * cols_ + active_[current], hits, negative_delta, plan.cycle, rng,
                         stats);
    }
  }
  return stats;
}

double CrossbarArray::saturation_fraction() const {
  std::size_t edge = 0;
  const double lo = device_->g_min();
  const double hi = device_->g_max();
  for (std::size_t i = 0; i < g1_.size(); ++i) {
    edge += (g1_[i] <= lo || g1_[i] >= hi) ? 1 : 0;
    edge += (g2_[i] <= lo || g2_[i] >= hi) ? 1 : 0;
  }
  return static_cast<double>(edge) / static_cast<double>(2 * g1_.size());
}

void CrossbarArray::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError("cannot write crossbar snapshot " + path.string());
  }
  out.write(kSnapshotMagic, 4);
  io::write_le<std::uint32_t>(out, kSnapshotVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows_));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols_));
  io::write_le<double>(out, k_);
  for (std::size_t i = 0; i < g1_.size(); ++i) {
    io::write_le<double>(out, g1_[i]);
    io::write_le<double>(out, g2_[i]);
  }
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

CrossbarArray CrossbarArray::load(const std::filesystem::path &path,
                                  std::shared_ptr<const DeviceModel> device) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open crossbar snapshot " + path.string());
  }
  const std::string what = "crossbar snapshot " + path.string();
  io::expect_magic(in, kSnapshotMagic, what);
  const auto version = io::read_le<std::uint32_t>(in, what);
  if (version != kSnapshotVersion) {
    throw FormatError(what + ": unsupported version " + std::to_string(version));
  }
  const auto rows = io::read_le<std::uint32_t>(in, what);
  const auto cols = io::read_le<std::uint32_t>(in, what);
  const auto k = io::read_le<double>(in, what);
  CrossbarArray arr(rows, cols, k, std::move(device));
  for (std::size_t i = 0; i < arr.g1_.size(); ++i) {
    const double g1 = io::read_le<double>(in, what);
    const double g2 = io::read_le<double>(in, what);
    arr.set_pair(i / cols, i % cols, {g1, g2});
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(what + ": trailing bytes after payload");
  }
  return arr;
}

WeightSampler kaiming_uniform(std::size_t fan_in) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  return [bound](RandomStream &rng) { return rng.uniform(-bound, bound); };
}

CrossbarArray initialize(std::size_t rows, std::size_t cols, double k,
                         std::shared_ptr<const DeviceModel> device, const WeightSampler &w0,
                         RandomStream &rng) {
  CrossbarArray arr(rows, cols, k, std::move(device));
  const DeviceModel &dev = arr.device();
  const double c = dev.g_center();
  const double room = std::min(c - dev.g_min(), dev.g_max() - c);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < cols; ++col) {
      const double half = w0(rng) / (2.0 * k);
      if (std::abs(half) > room) {
        std::ostringstream os;
        os << "initial weight needs |w0|/(2k) = " << std::abs(half) << " but only " << room
           << " fits around g_center; increase k";
        throw InitializationError(os.str());
      }
      arr.set_pair(r, col, {c + half, c - half});
    }
  }
  return arr;
}

} // namespace ctf
