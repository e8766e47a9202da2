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

/// Fitted pulse response v_T(n) = x1 * n^x2 + x3 (n = pulse number).
struct PowerLawFit {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  double operator()(double n) const;
  /// 0 < x2 < 1: the response saturates.
  bool is_sublinear() const { return x2 > 0.0 && x2 < 1.0; }
};

/// Per-pulse conductance change as a function of the present conductance,
///
///     delta(g) = amplitude * (orientation * (g - pivot))^exponent
///
/// which is the closed form obtained by differencing a PowerLawFit. The law is
/// real-valued only where orientation * (g - pivot) > 0; pivot is the
/// singularity.
struct UpdateLaw {
  double amplitude = 0.0;
  double pivot = 0.0;
  double exponent = 0.0;
  int orientation = 1;

  static UpdateLaw from_fit(const PowerLawFit &fit);

  bool defined_at(double g) const { return orientation * (g - pivot) > 0.0; }
  double operator()(double g) const;
};

// Response fits of the CTF device: erase (potentiation, LTD data) and program
// (depression, LTP data) pulse trains.
inline constexpr PowerLawFit kLtdFit{9.55e-4, 0.719, -0.322};
inline constexpr PowerLawFit kLtpFit{-2.38e-3, 0.580, -0.112};

// The same responses with the rounded closed-form coefficients; these are the
// shipped defaults.
inline constexpr UpdateLaw kPotentiationLaw{4.50e-5, -0.32, -0.39, +1};
inline constexpr UpdateLaw kDepressionLaw{-1.74e-5, -0.11, -0.72, -1};

enum class PulseDirection { potentiate, depress };

struct PulseOutcome {
  double g;
  bool saturated; // the raw step left the window and was clamped
};

struct DeviceParams {
  UpdateLaw potentiation = kPotentiationLaw;
  UpdateLaw depression = kDepressionLaw;
  double noise_fraction = 0.0;
  double g_min = -0.315;
  double g_max = 5.0;
  double g_center = -0.2;
};

/// Conductance-update model of one CTF device, in threshold-voltage units.
///
/// Immutable once constructed. A pulse moves g by the law for its direction
/// plus Gaussian noise of constant standard deviation
/// noise_fraction * delta_potentiate(g_center), then clamps to
/// [g_min, g_max].
class DeviceModel {
public:
  DeviceModel() : DeviceModel(DeviceParams{}) {}
  explicit DeviceModel(const DeviceParams &params); // throws ConfigError

  const DeviceParams &params() const { return params_; }
  double g_min() const { return params_.g_min; }
  double g_max() const { return params_.g_max; }
  double g_center() const { return params_.g_center; }
  double noise_fraction() const { return params_.noise_fraction; }
  double noise_sigma() const { return sigma_; }

  /// False when the depression law turns singular below g_max; depressing
  /// past its pivot then throws DomainError.
  bool depression_on_window() const { return depression_on_window_; }

  /// Throw DomainError outside [g_min, g_max].
  double delta_potentiate(double g) const;
  double delta_depress(double g) const;

  /// One pulse; draws exactly one N(0,1) sample from rng.
  PulseOutcome pulse(double g, PulseDirection direction, RandomStream &rng) const;
  double apply_pulse(double g, PulseDirection direction, RandomStream &rng) const {
    return pulse(g, direction, rng).g;
  }

  bool contains(double g) const { return g >= params_.g_min && g <= params_.g_max; }
  DeviceModel with_noise(double noise_fraction) const;

private:
  void check_domain(double g) const;
  void check_depression(double g) const;

  DeviceParams params_;
  double sigma_ = 0.0;
  bool depression_on_window_ = true;
};

/// The narrow window on which both laws are real: [-0.315, -0.115].
DeviceParams narrow_window_params();

} // namespace ctf
