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
// Command-line front end: run experiments and sweeps, fit pulse traces.

#include "ctf/config.hpp"
#include "ctf/curve_fit.hpp"
#include "ctf/errors.hpp"
#include "ctf/experiment.hpp"
#include "ctf/simd/kernels.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> jobs;
  std::optional<int> reps;
  bool quiet = false;
};

ctf::ExperimentConfig load(const std::string &path, const Overrides &o) {
  ctf::ExperimentConfig c = ctf::load_config(path);
  if (o.seed) {
    c.seed = *o.seed;
  }
  if (o.out) {
    c.out_dir = *o.out;
  }
  if (o.jobs) {
    c.jobs = *o.jobs;
  }
  if (o.reps) {
    c.repetitions = *o.reps;
  }
  c.validate();
  return c;
}

ctf::ProgressFn progress_for(const Overrides &o) {
  if (o.quiet) {
    return {};
  }
  return [](const std::string &line) { std::cerr << line << std::endl; };
}

void add_common(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--jobs", o.jobs, "Parallel repetitions (0 = all cores)");
  cmd->add_option("--reps", o.reps, "Override the repetition count");
  cmd->add_flag("-q,--quiet", o.quiet, "No per-repetition progress");
}

std::vector<double> list_or(const std::string &text, const std::vector<double> &fallback) {
  return text.empty() ? fallback : ctf::parse_number_list(text);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"ctfsim: charge-trap-flash crossbar training simulator"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "Force a kernel variant (scalar, avx2)");

  Overrides o;
  std::string config_path;
  std::string values;
  std::string trace_path;

  auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  add_common(run, o);

  auto *sweep_k = app.add_subcommand("sweep-k", "Sweep the weight scale k");
  sweep_k->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  sweep_k->add_option("--k", values, "Comma-separated k values");
  add_common(sweep_k, o);

  auto *sweep_noise = app.add_subcommand("sweep-noise", "Sweep the update noise fraction");
  sweep_noise->add_option("config", config_path, "Config file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_noise->add_option("--noise", values, "Comma-separated noise fractions");
  add_common(sweep_noise, o);

  auto *fit = app.add_subcommand("fit", "Fit x1 * n^x2 + x3 to a pulse trace CSV");
  fit->add_option("trace", trace_path, "CSV with pulse_number,v_T")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!simd.empty() && !ctf::simd::select_kernels(simd)) {
      std::cerr << "ctfsim: kernel variant '" << simd << "' is not available here\n";
      return 2;
    }
    if (fit->parsed()) {
      const auto trace = ctf::read_trace_csv(trace_path);
      const auto r = ctf::fit_power_law(trace);
      const auto law = ctf::UpdateLaw::from_fit(r.fit);
      std::cout << std::setprecision(6) << "x1 = " << r.fit.x1 << "\nx2 = " << r.fit.x2
                << "\nx3 = " << r.fit.x3 << "\nmse = " << r.mse << "\niterations = " << r.iterations
                << "\nstep law: delta(g) = " << law.amplitude << " * (" << law.orientation
                << " * (g - " << law.pivot << "))^" << law.exponent << '\n';
      return 0;
    }
    const ctf::ExperimentConfig config = load(config_path, o);
    if (run->parsed()) {
      const auto summary = ctf::run_experiment(config, progress_for(o));
      ctf::write_run_outputs(summary, config.out_dir);
      std::cout << ctf::format_summary(summary);
    } else if (sweep_k->parsed()) {
      const auto points =
          ctf::run_k_sweep(config, list_or(values, config.k_values), progress_for(o));
      ctf::write_sweep_outputs(points, "k", config, config.out_dir);
      std::cout << ctf::format_sweep(points, "k");
    } else {
      const auto points =
          ctf::run_noise_sweep(config, list_or(values, config.noise_values), progress_for(o));
      ctf::write_sweep_outputs(points, "noise", config, config.out_dir);
      std::cout << ctf::format_sweep(points, "noise");
    }
    std::cout << "outputs in " << config.out_dir.string() << '\n';
  } catch (const std::exception &e) {
    std::cerr << "ctfsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
