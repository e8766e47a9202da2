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

#include "ctf/random.hpp"

namespace ctf {

struct MountainCarState {
  double position = -0.5;
  double velocity = 0.0;
};

inline constexpr double kPositionMin = -1.2;
inline constexpr double kPositionMax = 0.6;
inline constexpr double kVelocityLimit = 0.07;
inline constexpr double kGoalPosition = 0.5;

enum Action : int { kBack = 0, kCoast = 1, kForward = 2 };
inline constexpr int kNumActions = 3;

struct StepResult {
  MountainCarState state;
  double reward;
  bool done;
};

/// Classic dynamics: v += 0.001 (a - 1) - 0.0025 cos(3 p), p += v, both clamped;
/// hitting the left wall stops the car. Reward is -1 every step.
StepResult env_step(const MountainCarState &s, int action);

class MountainCar {
public:
  /// Position U[-0.6, -0.4), velocity 0.
  const MountainCarState &reset(RandomStream &rng);
  StepResult step(int action); // PreconditionError after the goal was reached

  const MountainCarState &state() const { return state_; }
  bool done() const { return done_; }

private:
  MountainCarState state_;
  bool done_ = false;
};

} // namespace ctf
