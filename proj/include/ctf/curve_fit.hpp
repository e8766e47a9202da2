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
#include "ctf/errors.hpp"

#include <filesystem>
#include <vector>

namespace ctf {

struct TracePoint {
  int pulse_number;
  double v_t;
};

/// Measured threshold voltage after each pulse; pulse numbers strictly increase.
using PulseTrace = std::vector<TracePoint>;

struct FitResult {
  PowerLawFit fit;
  double mse = 0.0;
  int iterations = 0;
};

/// The nonlinear least-squares iteration did not settle.
class FitError : public Error {
public:
  FitError(const std::string &what, double residual_mse) : Error(what), mse_(residual_mse) {}
  double residual_mse() const { return mse_; }

private:
  double mse_;
};

/// Least-squares fit of v_T(n) = x1 * n^x2 + x3.
///
/// Levenberg-Marquardt from several starting exponents (0.3, 0.5, 0.7, 0.9);
/// for each start x1 and x3 are first solved linearly. The lowest-MSE
/// converged start wins. Needs at least four points.
FitResult fit_power_law(const PulseTrace &trace);

/// Two columns (pulse_number, v_T); an optional non-numeric header line is skipped.
PulseTrace read_trace_csv(const std::filesystem::path &path);

} // namespace ctf
