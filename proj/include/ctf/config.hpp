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

#include "ctf/crossbar.hpp"
#include "ctf/device_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctf {

enum class ExperimentKind { mnist, cifar10, cifar100, mountain_car, k_sweep, noise_sweep, toy_smoke };
enum class BackendKind { crossbar, floating };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(BackendKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Everything one run needs. defaults_for() fills in the published
/// hyperparameters, so a config file may name only the experiment.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::mnist;
  BackendKind backend = BackendKind::crossbar;

  double alpha = 0.01;
  std::optional<double> k; // default 600 * alpha
  int train_length = 10;
  UpdateCycle cycle = UpdateCycle::positive;
  DeviceParams device{};

  // Supervised runs.
  int epochs = 10;
  bool bias = false;
  std::size_t train_subset = 0; // 0 = whole split, else the first N samples
  std::size_t test_subset = 0;
  std::size_t checkpoint_every = 5000;
  bool checkpoint_test = true; // evaluate the test split at every checkpoint
  std::filesystem::path mnist_dir = "data/mnist";
  std::filesystem::path train_features;
  std::filesystem::path test_features;

  // Mountain car.
  int episodes = 500;
  double epsilon = 0.1;
  double gamma = 1.0;
  std::size_t max_steps = 1000;
  std::size_t final_window = 50; // episodes averaged for the final reward
  std::size_t index_table_size = 4096;

  // Sweeps; the underlying experiment is MNIST.
  std::vector<double> k_values{1, 2, 4, 6, 10, 20};
  std::vector<double> noise_values{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  double sweep_weight_range = 0.3; // |w| range assumed by the k diagnostics

  int repetitions = 10;
  std::uint64_t seed = 1;
  unsigned jobs = 0; // 0 = hardware concurrency
  std::filesystem::path out_dir = "results";

  double effective_k() const { return k ? *k : 600.0 * alpha; }
  double noise_fraction() const { return device.noise_fraction; }

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

ExperimentConfig defaults_for(ExperimentKind kind);

/// Flat key = value text with an [experiment] section and an optional
/// [device] section (ltd.x1/x2/x3, ltp.x1/x2/x3, noise_fraction, g_min,
/// g_max, g_center). Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Device parameters from the [device] section of a config file (or a file
/// holding only that section); missing keys keep the shipped defaults.
DeviceParams load_device_config(const std::filesystem::path &path);

std::vector<double> parse_number_list(std::string_view text);

} // namespace ctf
