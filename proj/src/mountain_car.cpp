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
#include "ctf/mountain_car.hpp"

#include "ctf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctf {

StepResult env_step(const MountainCarState &s, int action) {
  if (action < 0 || action >= kNumActions) {
    throw PreconditionError("mountain car: action must be 0 (back), 1 (coast) or 2 (forward)");
  }
  MountainCarState next;
  next.velocity = std::clamp(s.velocity + 0.001 * (action - 1) - 0.0025 * std::cos(3.0 * s.position),
                             -kVelocityLimit, kVelocityLimit);
  next.position = std::clamp(s.position + next.velocity, kPositionMin, kPositionMax);
  if (next.position <= kPositionMin) {
    next.velocity = 0.0;
  }
  return {next, -1.0, next.position >= kGoalPosition};
}

const MountainCarState &MountainCar::reset(RandomStream &rng) {
  state_ = {rng.uniform(-0.6, -0.4), 0.0};
  done_ = false;
  return state_;
}

StepResult MountainCar::step(int action) {
  if (done_) {
    throw PreconditionError("mountain car: step after the episode ended");
  }
  const StepResult r = env_step(state_, action);
  state_ = r.state;
  done_ = r.done;
  return r;
}

} // namespace ctf
