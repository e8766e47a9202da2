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
#include "ctf/tile_coder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctf {

std::size_t IndexHashTable::index(std::uint64_t key) {
  ++lookups_;
  if (auto it = slots_.find(key); it != slots_.end()) {
    return it->second;
  }
  if (slots_.size() >= capacity_) {
    std::ostringstream os;
    os << "tile coder: index table full (" << capacity_ << " slots)";
    throw CapacityError(os.str());
  }
  const std::size_t slot = slots_.size();
  slots_.emplace(key, slot);
  return slot;
}

TileCoder::TileCoder(TileCoderConfig config)
    : config_(std::move(config)), table_(config_.index_table_size) {
  if (config_.lows.empty() || config_.lows.size() != config_.highs.size() ||
      config_.lows.size() > 3) {
    throw PreconditionError("tile coder: need 1 to 3 dimensions with matching bounds");
  }
  if (config_.tiles_per_dim < 1 || config_.num_tilings < 1 || config_.num_tilings > 0xffff) {
    throw PreconditionError("tile coder: tiles_per_dim and num_tilings must be positive");
  }
  for (std::size_t d = 0; d < dims(); ++d) {
    if (!(config_.highs[d] > config_.lows[d])) {
      throw PreconditionError("tile coder: empty box");
    }
  }
}

std::vector<std::size_t> TileCoder::encode(std::span<const double> state) {
  std::vector<std::size_t> out;
  encode(state, out);
  return out;
}

void TileCoder::encode(std::span<const double> state, std::vector<std::size_t> &out) {
  if (state.size() != dims()) {
    throw PreconditionError("tile coder: state has the wrong dimension");
  }
  const int tilings = config_.num_tilings;
  // Quantise once at 1/num_tilings of a tile; each tiling then shifts the
  // quantised value and divides back down to whole tiles.
  long quantised[3] = {0, 0, 0};
  for (std::size_t d = 0; d < dims(); ++d) {
    const double lo = config_.lows[d];
    const double hi = config_.highs[d];
    if (!(state[d] >= lo && state[d] <= hi)) {
      throw PreconditionError("tile coder: state outside the coding box");
    }
    const double scaled = config_.tiles_per_dim * (state[d] - lo) / (hi - lo);
    quantised[d] = static_cast<long>(std::floor(scaled * tilings));
  }
  out.clear();
  for (int t = 0; t < tilings; ++t) {
    std::uint64_t key = static_cast<std::uint64_t>(t);
    long displacement = t;
    for (std::size_t d = 0; d < dims(); ++d) {
      const long coord = (quantised[d] + displacement) / tilings;
      key |= (static_cast<std::uint64_t>(coord) & 0xffff) << (16 * (d + 1));
      displacement += 2L * t;
    }
    out.push_back(table_.index(key));
  }
}

void to_dense(std::span<const std::size_t> active, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i : active) {
    out[i] = 1.0;
  }
}

} // namespace ctf
