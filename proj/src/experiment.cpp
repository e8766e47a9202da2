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
#include "ctf/experiment.hpp"

#include "ctf/errors.hpp"
#include "ctf/q_agent.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace ctf {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kToyDataStream = 99;

bool is_mnist(ExperimentKind kind) {
  return kind == ExperimentKind::mnist || kind == ExperimentKind::k_sweep ||
         kind == ExperimentKind::noise_sweep;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Runs body(i) for i in [0, n) on up to jobs threads; rethrows the first error.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)> &body) {
  if (jobs == 0) {
    jobs = std::max(1u, std::thread::hardware_concurrency());
  }
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
          next = n;
        }
      }
    });
  }
  workers.clear();
  if (error) {
    std::rethrow_exception(error);
  }
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::ofstream open_out(const fs::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << std::setprecision(10);
  return out;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_config(std::ostream &out, const ExperimentConfig &c) {
  out << "experiment = " << to_string(c.experiment) << "\n"
      << "backend = " << to_string(c.backend) << "\n"
      << "alpha = " << c.alpha << "\n"
      << "k = " << c.effective_k() << "\n"
      << "pl = " << c.train_length << "\n"
      << "cycle = " << (c.cycle == UpdateCycle::positive ? "positive" : "negative") << "\n"
      << "noise_fraction = " << c.device.noise_fraction << "\n"
      << "g_min = " << c.device.g_min << "\n"
      << "g_max = " << c.device.g_max << "\n"
      << "g_center = " << c.device.g_center << "\n"
      << "repetitions = " << c.repetitions << "\n"
      << "seed = " << c.seed << "\n";
  if (c.experiment == ExperimentKind::mountain_car) {
    out << "episodes = " << c.episodes << "\n"
        << "epsilon = " << c.epsilon << "\n"
        << "gamma = " << c.gamma << "\n"
        << "max_steps = " << c.max_steps << "\n"
        << "final_window = " << c.final_window << "\n";
  } else {
    out << "epochs = " << c.epochs << "\n"
        << "bias = " << (c.bias ? "true" : "false") << "\n"
        << "train_subset = " << c.train_subset << "\n"
        << "test_subset = " << c.test_subset << "\n";
  }
}

} // namespace

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.n = values.size();
  if (values.empty()) {
    return a;
  }
  a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.n);
  if (a.n > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - a.mean) * (v - a.mean);
    }
    a.stderr_ = std::sqrt(ss / static_cast<double>(a.n - 1)) / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

LabeledDataset make_toy_dataset(std::size_t n, RandomStream &rng) {
  LabeledDataset d;
  d.n_features = 2;
  d.n_classes = 2;
  d.features.reserve(2 * n);
  d.labels.reserve(n);
  while (d.size() < n) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    if (std::abs(a - b) < 0.1) {
      continue;
    }
    d.features.push_back(static_cast<float>(a));
    d.features.push_back(static_cast<float>(b));
    d.labels.push_back(a > b ? 1 : 0);
  }
  return d;
}

SupervisedData load_supervised_data(const ExperimentConfig &config) {
  SupervisedData data;
  if (is_mnist(config.experiment)) {
    data.train = load_mnist_train(config.mnist_dir);
    data.test = load_mnist_test(config.mnist_dir);
  } else if (config.experiment == ExperimentKind::cifar10 ||
             config.experiment == ExperimentKind::cifar100) {
    data.train = load_features(config.train_features);
    data.test = load_features(config.test_features);
    if (data.train.n_features != data.test.n_features ||
        data.train.n_classes != data.test.n_classes) {
      throw FormatError("train and test feature files disagree on shape");
    }
  } else if (config.experiment == ExperimentKind::toy_smoke) {
    RandomStream rng(config.seed, {kToyDataStream});
    data.train = make_toy_dataset(1000, rng);
    data.test = make_toy_dataset(500, rng);
  } else {
    throw ConfigError("experiment '" + std::string(to_string(config.experiment)) +
                      "' has no supervised data");
  }
  if (config.train_subset > 0) {
    data.train = data.train.head(config.train_subset);
  }
  if (config.test_subset > 0) {
    data.test = data.test.head(config.test_subset);
  }
  return data;
}

std::vector<LayerSpec> network_specs(const ExperimentConfig &config, std::size_t n_features,
                                     std::size_t n_classes) {
  if (is_mnist(config.experiment)) {
    return {{n_features, 256, Activation::relu, config.bias},
            {256, 128, Activation::relu, config.bias},
            {128, n_classes, Activation::softmax_output, config.bias}};
  }
  if (config.experiment == ExperimentKind::toy_smoke) {
    return {{n_features, 16, Activation::relu, config.bias},
            {16, n_classes, Activation::softmax_output, config.bias}};
  }
  // Feature classifiers have no hidden layers.
  return {{n_features, n_classes, Activation::softmax_output, config.bias}};
}

Backend make_backend(const ExperimentConfig &config) {
  if (config.backend == BackendKind::floating) {
    return FloatBackend{config.alpha};
  }
  CrossbarBackend b;
  b.device = std::make_shared<const DeviceModel>(config.device);
  b.alpha = config.alpha;
  b.k = config.effective_k();
  b.train_length = config.train_length;
  b.cycle = config.cycle;
  return b;
}

SupervisedRun run_supervised_rep(const ExperimentConfig &config, const SupervisedData &data,
                                 int rep) {
  const auto start = std::chrono::steady_clock::now();
  SupervisedRun run;
  run.rep = rep;
  run.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(rep)});
  RandomStream init_rng(run.seed, {kInitStream});
  RandomStream rng(run.seed, {kTrainStream});

  Network net(network_specs(config, data.train.n_features, data.train.n_classes),
              make_backend(config), init_rng);
  TrainingSession session(net);
  TrainOptions options;
  options.checkpoint_every = config.checkpoint_every;
  options.test = config.checkpoint_test ? &data.test : nullptr;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    train_epoch(session, data.train, rng, options);
  }
  const auto &entries = session.log().entries;
  if (entries.empty() || entries.back().images_seen != session.images_seen()) {
    session.checkpoint(&data.test);
  }
  run.log = session.log();
  run.train_accuracy = evaluate(net, data.train);
  run.test_accuracy = evaluate(net, data.test);
  run.saturation_fraction = net.saturation_fraction();
  run.stats = session.update_stats();
  run.elapsed_s = seconds_since(start);
  return run;
}

RlRun run_mountain_car_rep(const ExperimentConfig &config, int rep) {
  const auto start = std::chrono::steady_clock::now();
  RlRun run;
  run.rep = rep;
  run.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(rep)});
  RandomStream init_rng(run.seed, {kInitStream});
  RandomStream rng(run.seed, {kTrainStream});

  TileCoderConfig tiles;
  tiles.index_table_size = config.index_table_size;
  QAgentConfig qc;
  qc.epsilon = config.epsilon;
  qc.gamma = config.gamma;
  qc.max_steps = config.max_steps;
  QAgent agent(TileCoder(tiles), make_backend(config), qc, init_rng);
  MountainCar env;
  run.episodes.reserve(static_cast<std::size_t>(config.episodes));
  for (int e = 0; e < config.episodes; ++e) {
    const EpisodeResult r = q_learning_episode(agent, env, rng);
    run.episodes.push_back({e, r.total_reward, r.steps, config.epsilon});
  }
  const std::size_t window = std::min(config.final_window, run.episodes.size());
  double sum = 0.0;
  for (std::size_t i = run.episodes.size() - window; i < run.episodes.size(); ++i) {
    sum += run.episodes[i].total_reward;
  }
  run.final_reward = sum / static_cast<double>(window);
  run.elapsed_s = seconds_since(start);
  return run;
}

RunSummary run_experiment(const ExperimentConfig &config, const ProgressFn &progress) {
  config.validate();
  RunSummary summary;
  summary.config = config;
  const auto reps = static_cast<std::size_t>(config.repetitions);
  std::mutex progress_mutex;
  const auto report = [&](const std::string &line) {
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(line);
    }
  };

  if (config.experiment == ExperimentKind::mountain_car) {
    summary.rl.resize(reps);
    parallel_for(reps, config.jobs, [&](std::size_t i) {
      summary.rl[i] = run_mountain_car_rep(config, static_cast<int>(i));
      report("rep " + std::to_string(i) + ": final reward " + fmt(summary.rl[i].final_reward));
    });
    std::vector<double> rewards;
    for (const auto &r : summary.rl) {
      rewards.push_back(r.final_reward);
    }
    summary.final_reward = aggregate(rewards);
    return summary;
  }

  const SupervisedData data = load_supervised_data(config);
  summary.supervised.resize(reps);
  parallel_for(reps, config.jobs, [&](std::size_t i) {
    summary.supervised[i] = run_supervised_rep(config, data, static_cast<int>(i));
    report("rep " + std::to_string(i) + ": train " + fmt(summary.supervised[i].train_accuracy) +
           " test " + fmt(summary.supervised[i].test_accuracy));
  });
  std::vector<double> train;
  std::vector<double> test;
  for (const auto &r : summary.supervised) {
    train.push_back(r.train_accuracy);
    test.push_back(r.test_accuracy);
  }
  summary.train_accuracy = aggregate(train);
  summary.test_accuracy = aggregate(test);
  return summary;
}

KDiagnostics k_diagnostics(const DeviceModel &device, double k, double weight_range) {
  if (!(k > 0.0) || !(weight_range > 0.0)) {
    throw PreconditionError("k_diagnostics: k and weight_range must be positive");
  }
  KDiagnostics d;
  d.k = k;
  const double half = weight_range / (2.0 * k);
  d.g_low = std::max(device.g_center() - half, device.g_min());
  d.g_high = std::min(device.g_center() + half, device.g_max());

  // Potentiation steps shrink with g, so the extremes sit at the range ends.
  const double largest = device.delta_potentiate(d.g_low);
  const double smallest = device.delta_potentiate(d.g_high);
  d.max_relative_sigma = device.noise_sigma() / smallest;
  d.nonlinearity = largest / smallest - 1.0;

  // levels = integral of dg / delta(g), midpoint rule.
  constexpr int kSteps = 2000;
  const double h = (d.g_high - d.g_low) / kSteps;
  for (int i = 0; i < kSteps; ++i) {
    d.levels += h / device.delta_potentiate(d.g_low + (i + 0.5) * h);
  }
  return d;
}

std::vector<SweepPoint> run_k_sweep(const ExperimentConfig &config,
                                    const std::vector<double> &k_values,
                                    const ProgressFn &progress) {
  std::vector<SweepPoint> points;
  const DeviceModel device(config.device);
  for (double k : k_values) {
    ExperimentConfig c = config;
    c.k = k;
    if (progress) {
      progress("k = " + fmt(k));
    }
    SweepPoint p;
    p.value = k;
    p.diagnostics = k_diagnostics(device, k, config.sweep_weight_range);
    p.summary = run_experiment(c, progress);
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<SweepPoint> run_noise_sweep(const ExperimentConfig &config,
                                        const std::vector<double> &noise_values,
                                        const ProgressFn &progress) {
  std::vector<SweepPoint> points;
  for (double noise : noise_values) {
    ExperimentConfig c = config;
    c.device.noise_fraction = noise;
    if (progress) {
      progress("noise = " + fmt(noise));
    }
    SweepPoint p;
    p.value = noise;
    p.summary = run_experiment(c, progress);
    points.push_back(std::move(p));
  }
  return points;
}

void write_run_outputs(const RunSummary &summary, const fs::path &dir) {
  fs::create_directories(dir);
  const ExperimentConfig &c = summary.config;

  if (!summary.rl.empty()) {
    auto episodes = open_out(dir / "episodes.csv");
    episodes << "run_id,episode,total_reward,steps,epsilon\n";
    auto reps = open_out(dir / "reps.csv");
    reps << "run_id,seed,final_reward\n";
    for (const auto &r : summary.rl) {
      for (const auto &e : r.episodes) {
        episodes << r.rep << ',' << e.episode << ',' << e.total_reward << ',' << e.steps << ','
                 << e.epsilon << '\n';
      }
      reps << r.rep << ',' << r.seed << ',' << r.final_reward << '\n';
    }
    auto agg = open_out(dir / "aggregate.csv");
    agg << "metric,mean,stderr,n\n"
        << "final_reward," << summary.final_reward.mean << ',' << summary.final_reward.stderr_
        << ',' << summary.final_reward.n << '\n';
  } else {
    auto log = open_out(dir / "log.csv");
    log << "run_id,seed,images_seen,train_acc,test_acc,saturation_fraction,elapsed_s\n";
    auto reps = open_out(dir / "reps.csv");
    reps << "run_id,seed,train_acc,test_acc,saturation_fraction,coincidences,probability_clips,"
            "saturations\n";
    for (const auto &r : summary.supervised) {
      for (const auto &cp : r.log.entries) {
        log << r.rep << ',' << r.seed << ',' << cp.images_seen << ',' << cp.train_accuracy << ','
            << cp.test_accuracy << ',' << cp.saturation_fraction << ',' << cp.wall_time << '\n';
      }
      reps << r.rep << ',' << r.seed << ',' << r.train_accuracy << ',' << r.test_accuracy << ','
           << r.saturation_fraction << ',' << r.stats.coincidences << ','
           << r.stats.probability_clips << ',' << r.stats.saturations << '\n';
    }
    auto agg = open_out(dir / "aggregate.csv");
    agg << "metric,mean,stderr,n\n"
        << "train_acc," << summary.train_accuracy.mean << ',' << summary.train_accuracy.stderr_
        << ',' << summary.train_accuracy.n << '\n'
        << "test_acc," << summary.test_accuracy.mean << ',' << summary.test_accuracy.stderr_ << ','
        << summary.test_accuracy.n << '\n';
  }

  auto text = open_out(dir / "summary.txt");
  text << format_summary(summary);

  auto meta = open_out(dir / "metadata.txt");
  meta << "written = " << timestamp() << '\n';
  double total = 0.0;
  for (const auto &r : summary.supervised) {
    total += r.elapsed_s;
  }
  for (const auto &r : summary.rl) {
    total += r.elapsed_s;
  }
  meta << "rep_seconds_total = " << total << '\n';
  write_config(meta, c);
}

void write_sweep_outputs(const std::vector<SweepPoint> &points, std::string_view parameter,
                         const ExperimentConfig &config, const fs::path &dir) {
  fs::create_directories(dir);
  const std::string name(parameter);
  auto agg = open_out(dir / (name + "_sweep.csv"));
  agg << name << ",train_mean,train_stderr,test_mean,test_stderr,n";
  const bool with_diag = parameter == "k";
  if (with_diag) {
    agg << ",g_low,g_high,max_relative_sigma,levels,nonlinearity";
  }
  agg << '\n';
  auto reps = open_out(dir / "reps.csv");
  reps << name << ",run_id,seed,train_acc,test_acc,saturation_fraction\n";
  for (const auto &p : points) {
    const auto &s = p.summary;
    agg << p.value << ',' << s.train_accuracy.mean << ',' << s.train_accuracy.stderr_ << ','
        << s.test_accuracy.mean << ',' << s.test_accuracy.stderr_ << ',' << s.test_accuracy.n;
    if (with_diag) {
      const auto &d = p.diagnostics;
      agg << ',' << d.g_low << ',' << d.g_high << ',' << d.max_relative_sigma << ',' << d.levels
          << ',' << d.nonlinearity;
    }
    agg << '\n';
    for (const auto &r : s.supervised) {
      reps << p.value << ',' << r.rep << ',' << r.seed << ',' << r.train_accuracy << ','
           << r.test_accuracy << ',' << r.saturation_fraction << '\n';
    }
  }
  auto text = open_out(dir / "summary.txt");
  text << format_sweep(points, parameter);
  auto meta = open_out(dir / "metadata.txt");
  meta << "written = " << timestamp() << '\n' << "sweep = " << name << '\n';
  write_config(meta, config);
}

std::string format_summary(const RunSummary &s) {
  std::ostringstream os;
  os << std::fixed;
  os << to_string(s.config.experiment) << " / " << to_string(s.config.backend)
     << "  alpha=" << s.config.alpha << " k=" << s.config.effective_k()
     << " noise=" << s.config.device.noise_fraction << " reps=" << s.config.repetitions
     << " seed=" << s.config.seed << '\n';
  if (!s.rl.empty()) {
    os << std::setprecision(2);
    os << "rep  final_reward\n";
    for (const auto &r : s.rl) {
      os << std::setw(3) << r.rep << "  " << std::setw(12) << r.final_reward << '\n';
    }
    os << "mean " << s.final_reward.mean << " +/- " << s.final_reward.stderr_ << " (stderr, n="
       << s.final_reward.n << ")\n";
    return os.str();
  }
  os << std::setprecision(4);
  os << "rep  train_acc  test_acc  saturation\n";
  for (const auto &r : s.supervised) {
    os << std::setw(3) << r.rep << "  " << std::setw(9) << 100.0 * r.train_accuracy << "  "
       << std::setw(8) << 100.0 * r.test_accuracy << "  " << std::setw(10)
       << r.saturation_fraction << '\n';
  }
  os << std::setprecision(3);
  os << "train " << 100.0 * s.train_accuracy.mean << " +/- " << 100.0 * s.train_accuracy.stderr_
     << " %\n";
  os << "test  " << 100.0 * s.test_accuracy.mean << " +/- " << 100.0 * s.test_accuracy.stderr_
     << " % (stderr, n=" << s.test_accuracy.n << ")\n";
  return os.str();
}

std::string format_sweep(const std::vector<SweepPoint> &points, std::string_view parameter) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  const bool with_diag = parameter == "k";
  os << std::setw(8) << parameter << "  train%            test%";
  if (with_diag) {
    os << "             levels   max_sigma/mu";
  }
  os << '\n';
  for (const auto &p : points) {
    const auto &s = p.summary;
    os << std::setw(8) << p.value << "  " << std::setw(7) << 100.0 * s.train_accuracy.mean
       << " +/- " << std::setw(5) << 100.0 * s.train_accuracy.stderr_ << "  " << std::setw(7)
       << 100.0 * s.test_accuracy.mean << " +/- " << std::setw(5)
       << 100.0 * s.test_accuracy.stderr_;
    if (with_diag) {
      os << "  " << std::setw(9) << p.diagnostics.levels << "  " << std::setw(12)
         << p.diagnostics.max_relative_sigma;
    }
    os << '\n';
  }
  return os.str();
}

} // namespace ctf
