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

#include "ctf/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace ctf {

/// Hash-table index assignment in the style of Sutton's tile-coding software:
/// each distinct tile coordinate gets the next free slot, in first-seen order.
class IndexHashTable {
public:
  explicit IndexHashTable(std::size_t capacity) : capacity_(capacity) {}

  /// CapacityError once every slot is taken and a new key arrives.
  std::size_t index(std::uint64_t key);

  std::size_t capacity() const { return capacity_; }
  std::size_t used() const { return slots_.size(); }
  std::uint64_t lookups() const { return lookups_; }

private:
  std::size_t capacity_;
  std::unordered_map<std::uint64_t, std::size_t> slots_;
  std::uint64_t lookups_ = 0;
};

struct TileCoderConfig {
  int tiles_per_dim = 8;
  int num_tilings = 16;
  std::size_t index_table_size = 4096;
  std::vector<double> lows{-1.2, -0.07};
  std::vector<double> highs{0.6, 0.07};
};

/// Multiple offset grids over a box of up to three dimensions; tiling t is
/// displaced by t/num_tilings of a tile times (1, 3, 5) per dimension.
class TileCoder {
public:
  explicit TileCoder(TileCoderConfig config = {});

  const TileCoderConfig &config() const { return config_; }
  std::size_t dims() const { return config_.lows.size(); }
  std::size_t feature_count() const { return config_.index_table_size; }
  const IndexHashTable &table() const { return table_; }

  /// Exactly num_tilings active indices, one per tiling. Inputs outside the
  /// box are a PreconditionError.
  std::vector<std::size_t> encode(std::span<const double> state);
  void encode(std::span<const double> state, std::vector<std::size_t> &out);

private:
  TileCoderConfig config_;
  IndexHashTable table_;
};

/// Writes the binary feature vector for the given active indices into out.
void to_dense(std::span<const std::size_t> active, std::span<double> out);

} // namespace ctf
