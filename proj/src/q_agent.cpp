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
#include "ctf/q_agent.hpp"

#include "ctf/errors.hpp"

#include <algorithm>

namespace ctf {

namespace {

std::vector<LayerSpec> q_layer(std::size_t features) {
  return {LayerSpec{features, kNumActions, Activation::identity, false}};
}

} // namespace

QAgent::QAgent(TileCoder coder, const Backend &backend, QAgentConfig config,
               RandomStream &init_rng)
    : coder_(std::move(coder)), config_(config),
      net_(q_layer(coder_.feature_count()), backend, init_rng), dense_(coder_.feature_count(), 0.0),
      delta_(kNumActions, 0.0) {
  if (!(config_.epsilon >= 0.0 && config_.epsilon <= 1.0)) {
    throw PreconditionError("q agent: epsilon must lie in [0, 1]");
  }
}

const std::vector<std::size_t> &QAgent::encode(const MountainCarState &s) {
  const double state[2] = {s.position, s.velocity};
  coder_.encode(state, scratch_active_);
  return scratch_active_;
}

std::array<double, kNumActions> QAgent::q_values(std::span<const std::size_t> active) const {
  const auto w = net_.layer(0).weights();
  const std::size_t cols = net_.layer(0).inputs();
  std::array<double, kNumActions> q{};
  for (int a = 0; a < kNumActions; ++a) {
    double sum = 0.0;
    for (std::size_t j : active) {
      sum += w[static_cast<std::size_t>(a) * cols + j];
    }
    q[static_cast<std::size_t>(a)] = sum;
  }
  return q;
}

int QAgent::select_action(std::span<const std::size_t> active, RandomStream &rng) {
  ++choices_;
  const auto q = q_values(active);
  const double best = *std::max_element(q.begin(), q.end());
  int ties[kNumActions];
  int n_ties = 0;
  for (int a = 0; a < kNumActions; ++a) {
    if (q[static_cast<std::size_t>(a)] == best) {
      ties[n_ties++] = a;
    }
  }
  if (rng.uniform() < config_.epsilon) {
    const int a = static_cast<int>(rng.index(kNumActions));
    if (q[static_cast<std::size_t>(a)] != best) {
      ++exploratory_;
    }
    return a;
  }
  return n_ties == 1 ? ties[0] : ties[rng.index(static_cast<std::size_t>(n_ties))];
}

UpdateStats QAgent::update(std::span<const std::size_t> active, int action, double target,
                           RandomStream &rng) {
  const auto q = q_values(active);
  std::fill(delta_.begin(), delta_.end(), 0.0);
  delta_[static_cast<std::size_t>(action)] = q[static_cast<std::size_t>(action)] - target;
  to_dense(active, dense_);
  const UpdateStats stats = net_.layer(0).update(dense_, delta_, rng);
  net_.touch();
  return stats;
}

EpisodeResult q_learning_episode(QAgent &agent, MountainCar &env, RandomStream &rng) {
  EpisodeResult result;
  const auto &cfg = agent.config();
  std::vector<std::size_t> current = agent.encode(env.reset(rng));
  while (result.steps < cfg.max_steps) {
    const int action = agent.select_action(current, rng);
    const StepResult step = env.step(action);
    ++result.steps;
    result.total_reward += step.reward;
    double target = step.reward;
    std::vector<std::size_t> next = agent.encode(step.state);
    if (!step.done) {
      const auto q_next = agent.q_values(next);
      target += cfg.gamma * *std::max_element(q_next.begin(), q_next.end());
    }
    agent.update(current, action, target, rng);
    if (step.done) {
      result.reached_goal = true;
      break;
    }
    current = std::move(next);
  }
  return result;
}

} // namespace ctf
