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

#include "ctf/config.hpp"
#include "ctf/dataset.hpp"
#include "ctf/network.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace ctf {

/// Mean and standard error over repetitions.
struct Aggregate {
  double mean = 0.0;
  double stderr_ = 0.0; // sample std / sqrt(n); 0 for n < 2
  std::size_t n = 0;
};
Aggregate aggregate(std::span<const double> values);

struct SupervisedData {
  LabeledDataset train;
  LabeledDataset test;
};

/// Two linearly separable classes in [0, 1]^2 with a margin of 0.1.
LabeledDataset make_toy_dataset(std::size_t n, RandomStream &rng);

/// Loads (or generates) the data named by the config, subset applied.
/// Throws FormatError / std::runtime_error when files are missing.
SupervisedData load_supervised_data(const ExperimentConfig &config);

std::vector<LayerSpec> network_specs(const ExperimentConfig &config, std::size_t n_features,
                                     std::size_t n_classes);
Backend make_backend(const ExperimentConfig &config);

struct SupervisedRun {
  int rep = 0;
  std::uint64_t seed = 0;
  TrainingLog log;
  double train_accuracy = 0.0; // full pass over the training split after the last epoch
  double test_accuracy = 0.0;
  double saturation_fraction = 0.0;
  UpdateStats stats;
  double elapsed_s = 0.0;
};

struct EpisodeRecord {
  int episode = 0;
  double total_reward = 0.0;
  std::size_t steps = 0;
  double epsilon = 0.0;
};

struct RlRun {
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  double final_reward = 0.0; // mean over the last final_window episodes
  double elapsed_s = 0.0;
};

SupervisedRun run_supervised_rep(const ExperimentConfig &config, const SupervisedData &data,
                                 int rep);
RlRun run_mountain_car_rep(const ExperimentConfig &config, int rep);

struct RunSummary {
  ExperimentConfig config;
  std::vector<SupervisedRun> supervised;
  std::vector<RlRun> rl;
  Aggregate train_accuracy;
  Aggregate test_accuracy;
  Aggregate final_reward;
};

using ProgressFn = std::function<void(const std::string &)>;

/// Runs every repetition of a supervised or Mountain Car experiment.
/// Repetitions run on config.jobs threads; results do not depend on it.
RunSummary run_experiment(const ExperimentConfig &config, const ProgressFn &progress = {});

/// Analytic view of the conductance range a given k asks for.
struct KDiagnostics {
  double k = 0.0;
  double g_low = 0.0; // range holding |w| <= weight_range around g_center
  double g_high = 0.0;
  double max_relative_sigma = 0.0; // sigma / smallest mean step in range
  double levels = 0.0;             // mean potentiation pulses to cross the range
  double nonlinearity = 0.0;       // largest / smallest mean step in range, minus 1
};
KDiagnostics k_diagnostics(const DeviceModel &device, double k, double weight_range);

struct SweepPoint {
  double value = 0.0;
  RunSummary summary;
  KDiagnostics diagnostics; // k sweeps only
};

std::vector<SweepPoint> run_k_sweep(const ExperimentConfig &config,
                                    const std::vector<double> &k_values,
                                    const ProgressFn &progress = {});
std::vector<SweepPoint> run_noise_sweep(const ExperimentConfig &config,
                                        const std::vector<double> &noise_values,
                                        const ProgressFn &progress = {});

/// log.csv or episodes.csv, reps.csv, aggregate.csv, summary.txt and
/// metadata.txt. Everything except metadata.txt and the elapsed_s columns is
/// a pure function of config and seed.
void write_run_outputs(const RunSummary &summary, const std::filesystem::path &dir);
void write_sweep_outputs(const std::vector<SweepPoint> &points, std::string_view parameter,
                         const ExperimentConfig &config, const std::filesystem::path &dir);

std::string format_summary(const RunSummary &summary);
std::string format_sweep(const std::vector<SweepPoint> &points, std::string_view parameter);

} // namespace ctf
