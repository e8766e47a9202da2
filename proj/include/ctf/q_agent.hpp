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

#include "ctf/mountain_car.hpp"
#include "ctf/network.hpp"
#include "ctf/tile_coder.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ctf {

struct QAgentConfig {
  double epsilon = 0.1;
  double gamma = 1.0;
  std::size_t max_steps = 1000;
};

struct EpisodeResult {
  double total_reward = 0.0;
  std::size_t steps = 0;
  bool reached_goal = false;
};

/// Linear Q-function over tile-coded features, one weight row per action.
///
/// The backend's step size (learning_rate or alpha) is the Q-learning alpha.
/// Only the chosen action's row is updated each step.
class QAgent {
public:
  QAgent(TileCoder coder, const Backend &backend, QAgentConfig config, RandomStream &init_rng);

  const QAgentConfig &config() const { return config_; }
  const Network &network() const { return net_; }
  TileCoder &coder() { return coder_; }

  const std::vector<std::size_t> &encode(const MountainCarState &s);

  std::array<double, kNumActions> q_values(std::span<const std::size_t> active) const;

  /// Epsilon-greedy; greedy ties broken uniformly at random.
  int select_action(std::span<const std::size_t> active, RandomStream &rng);

  /// Moves q(s, action) towards target: delta = q(s, action) - target on the action row.
  UpdateStats update(std::span<const std::size_t> active, int action, double target,
                     RandomStream &rng);

  std::uint64_t exploratory_choices() const { return exploratory_; }
  std::uint64_t total_choices() const { return choices_; }

private:
  TileCoder coder_;
  QAgentConfig config_;
  Network net_;
  std::vector<std::size_t> scratch_active_;
  std::vector<double> dense_;
  std::vector<double> delta_;
  std::uint64_t exploratory_ = 0;
  std::uint64_t choices_ = 0;
};

/// One episode of Q-learning, capped at config().max_steps transitions.
/// Terminal transitions bootstrap from R alone.
EpisodeResult q_learning_episode(QAgent &agent, MountainCar &env, RandomStream &rng);

} // namespace ctf
