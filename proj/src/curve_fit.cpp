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
#include "ctf/curve_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace ctf {

namespace {

constexpr std::array<double, 4> kStartExponents{0.3, 0.5, 0.7, 0.9};
constexpr int kMaxIterations = 2000;

struct Problem {
  Eigen::ArrayXd n;
  Eigen::ArrayXd log_n;
  Eigen::ArrayXd v;
};

double sum_squares(const Problem &pb, const Eigen::Vector3d &p) {
  const Eigen::ArrayXd r = p[0] * pb.n.pow(p[1]) + p[2] - pb.v;
  return r.square().sum();
}

// x1, x3 by ordinary least squares with x2 held fixed.
Eigen::Vector3d linear_start(const Problem &pb, double x2) {
  const Eigen::ArrayXd t = pb.n.pow(x2);
  const double t_mean = t.mean();
  const double v_mean = pb.v.mean();
  const double stt = (t - t_mean).square().sum();
  const double slope = stt > 0.0 ? ((t - t_mean) * (pb.v - v_mean)).sum() / stt : 0.0;
  return {slope, x2, v_mean - slope * t_mean};
}

struct LocalResult {
  Eigen::Vector3d p;
  double sse;
  int iterations;
  bool converged;
};

LocalResult levenberg_marquardt(const Problem &pb, Eigen::Vector3d p) {
  const auto m = pb.n.size();
  double sse = sum_squares(pb, p);
  double lambda = 1e-3;
  Eigen::MatrixXd jac(m, 3);
  for (int it = 1; it <= kMaxIterations; ++it) {
    if (sse <= 1e-30 * static_cast<double>(m)) {
      return {p, sse, it, true};
    }
    const Eigen::ArrayXd t = pb.n.pow(p[1]);
    const Eigen::ArrayXd r = p[0] * t + p[2] - pb.v;
    jac.col(0) = t.matrix();
    jac.col(1) = (p[0] * t * pb.log_n).matrix();
    jac.col(2).setOnes();
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * r.matrix();
    Eigen::Vector3d diag = jtj.diagonal();
    const double floor = 1e-12 * diag.maxCoeff();
    diag = diag.cwiseMax(floor > 0.0 ? floor : 1e-300);

    bool stepped = false;
    while (lambda < 1e20) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += lambda * diag;
      const Eigen::Vector3d step = damped.ldlt().solve(-grad);
      const Eigen::Vector3d trial = p + step;
      const double trial_sse = sum_squares(pb, trial);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        const bool tiny = step.norm() <= 1e-14 * (p.norm() + 1e-14);
        const bool flat = sse - trial_sse <= 1e-16 * sse;
        p = trial;
        sse = trial_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (tiny || flat) {
          return {p, sse, it, true};
        }
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      // No downhill direction left at working precision.
      return {p, sse, it, true};
    }
  }
  return {p, sse, kMaxIterations, false};
}

} // namespace

FitResult fit_power_law(const PulseTrace &trace) {
  if (trace.size() < 4) {
    throw PreconditionError("fit_power_law: need at least 4 trace points");
  }
  Problem pb{Eigen::ArrayXd(trace.size()), Eigen::ArrayXd(trace.size()),
             Eigen::ArrayXd(trace.size())};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].pulse_number < 1 || (i > 0 && trace[i].pulse_number <= trace[i - 1].pulse_number)) {
      throw PreconditionError("fit_power_law: pulse numbers must be >= 1 and strictly increasing");
    }
    if (!std::isfinite(trace[i].v_t)) {
      throw PreconditionError("fit_power_law: non-finite v_T");
    }
    pb.n[i] = trace[i].pulse_number;
    pb.log_n[i] = std::log(pb.n[i]);
    pb.v[i] = trace[i].v_t;
  }
  const double count = static_cast<double>(trace.size());

  bool any = false;
  LocalResult best{};
  double best_failed = std::numeric_limits<double>::infinity();
  for (double x2 : kStartExponents) {
    const LocalResult local = levenberg_marquardt(pb, linear_start(pb, x2));
    if (!local.converged) {
      best_failed = std::min(best_failed, local.sse / count);
      continue;
    }
    if (!any || local.sse < best.sse) {
      best = local;
      any = true;
    }
  }
  if (!any) {
    std::ostringstream os;
    os << "fit_power_law: no start converged (best MSE " << best_failed << ")";
    throw FitError(os.str(), best_failed);
  }
  return {{best.p[0], best.p[1], best.p[2]}, best.sse / count, best.iterations};
}

PulseTrace read_trace_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open trace file " + path.string());
  }
  PulseTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double n = 0.0;
    double v = 0.0;
    if (!(fields >> n >> v)) {
      if (line_no == 1 && trace.empty()) {
        continue; // header
      }
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    if (n != std::floor(n)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": pulse number must be an integer");
    }
    trace.push_back({static_cast<int>(n), v});
  }
  return trace;
}

} // namespace ctf
