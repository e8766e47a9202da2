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
#include "ctf/device_model.hpp"

#include "ctf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctf {

double PowerLawFit::operator()(double n) const { return x1 * std::pow(n, x2) + x3; }

UpdateLaw UpdateLaw::from_fit(const PowerLawFit &fit) {
  // Differencing v(n) gives dv = x1*x2*((v - x3)/x1)^((x2-1)/x2); fold the
  // sign of x1 into the orientation so the base stays positive.
  UpdateLaw law;
  law.exponent = (fit.x2 - 1.0) / fit.x2;
  law.orientation = fit.x1 > 0.0 ? 1 : -1;
  law.amplitude = fit.x1 * fit.x2 * std::pow(std::abs(fit.x1), -law.exponent);
  law.pivot = fit.x3;
  return law;
}

double UpdateLaw::operator()(double g) const {
  return amplitude * std::pow(orientation * (g - pivot), exponent);
}

DeviceModel::DeviceModel(const DeviceParams &params) : params_(params) {
  const auto fail = [](const std::string &what) { throw ConfigError("device model: " + what); };
  if (!(params.g_min < params.g_max)) {
    fail("g_min must be below g_max");
  }
  if (!(params.g_center > params.g_min && params.g_center < params.g_max)) {
    fail("g_center must lie strictly inside [g_min, g_max]");
  }
  if (!(params.noise_fraction >= 0.0) || !std::isfinite(params.noise_fraction)) {
    fail("noise_fraction must be finite and >= 0");
  }
  for (double g : {params.g_min, params.g_max}) {
    const double step = params.potentiation.defined_at(g) ? params.potentiation(g) : 0.0;
    if (!(step > 0.0) || !std::isfinite(step)) {
      std::ostringstream os;
      os << "potentiation step must be positive and finite on the window (fails at g = " << g
         << ")";
      fail(os.str());
    }
  }
  // Depression may turn singular inside a wide window; it must at least hold
  // from g_min up to g_center, where training starts.
  for (double g : {params.g_min, params.g_center}) {
    const double step = params.depression.defined_at(g) ? params.depression(g) : 0.0;
    if (!(step < 0.0) || !std::isfinite(step)) {
      std::ostringstream os;
      os << "depression step must be negative and finite on [g_min, g_center] (fails at g = " << g
         << ")";
      fail(os.str());
    }
  }
  depression_on_window_ = params.depression.defined_at(params.g_max) &&
                          std::isfinite(params.depression(params.g_max));
  sigma_ = params.noise_fraction * params.potentiation(params.g_center);
}

void DeviceModel::check_domain(double g) const {
  if (!(g >= params_.g_min && g <= params_.g_max)) {
    std::ostringstream os;
    os << "conductance " << g << " outside [" << params_.g_min << ", " << params_.g_max << "]";
    throw DomainError(os.str());
  }
}

void DeviceModel::check_depression(double g) const {
  if (!params_.depression.defined_at(g)) {
    std::ostringstream os;
    os << "depression law undefined at g = " << g << " (pivot " << params_.depression.pivot << ")";
    throw DomainError(os.str());
  }
}

double DeviceModel::delta_potentiate(double g) const {
  check_domain(g);
  return params_.potentiation(g);
}

double DeviceModel::delta_depress(double g) const {
  check_domain(g);
  check_depression(g);
  return params_.depression(g);
}

PulseOutcome DeviceModel::pulse(double g, PulseDirection direction, RandomStream &rng) const {
  check_domain(g);
  if (direction == PulseDirection::depress) {
    check_depression(g);
  }
  const double step =
      direction == PulseDirection::potentiate ? params_.potentiation(g) : params_.depression(g);
  const double raw = g + step + sigma_ * rng.normal();
  const double clamped = std::clamp(raw, params_.g_min, params_.g_max);
  return {clamped, clamped != raw};
}

DeviceParams narrow_window_params() {
  DeviceParams p;
  p.g_min = -0.315;
  p.g_max = -0.115;
  return p;
}

DeviceModel DeviceModel::with_noise(double noise_fraction) const {
  DeviceParams p = params_;
  p.noise_fraction = noise_fraction;
  return DeviceModel(p);
}

} // namespace ctf
