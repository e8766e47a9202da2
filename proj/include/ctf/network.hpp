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
#include "ctf/dataset.hpp"
#include "ctf/random.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace ctf {

enum class Activation { relu, softmax_output, identity };

struct LayerSpec {
  std::size_t in_dim = 1;
  std::size_t out_dim = 1;
  Activation activation = Activation::relu;
  bool bias = false; // extra always-on input column (x = 1)
};

/// Exact floating-point weights: W <- W - learning_rate * delta x^T.
struct FloatBackend {
  double learning_rate = 0.01;
};

/// Weights on CTF crossbars; updates go through pulse-train coincidences with
/// C derived from alpha, k and PL.
struct CrossbarBackend {
  std::shared_ptr<const DeviceModel> device;
  double alpha = 0.01;
  double k = 6.0;
  int train_length = 10;
  UpdateCycle cycle = UpdateCycle::positive;
};

using Backend = std::variant<FloatBackend, CrossbarBackend>;

/// Plain dense weight matrix with the same read interface as CrossbarArray.
class DenseWeights {
public:
  DenseWeights(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), w_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> weights() const { return w_; }
  std::span<double> mutable_weights() { return w_; }

  void forward(std::span<const double> x, std::span<double> y) const;
  void backward(std::span<const double> delta, std::span<double> out) const;
  void update(std::span<const double> x, std::span<const double> delta, double learning_rate);

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> w_;
};

class Layer {
public:
  using Store = std::variant<DenseWeights, CrossbarArray>;

  Layer(LayerSpec spec, Store store, PulsePlan plan, double learning_rate)
      : spec_(spec), store_(std::move(store)), plan_(plan), learning_rate_(learning_rate) {}

  const LayerSpec &spec() const { return spec_; }
  std::size_t inputs() const { return spec_.in_dim + (spec_.bias ? 1 : 0); }
  bool is_crossbar() const { return std::holds_alternative<CrossbarArray>(store_); }
  const PulsePlan &plan() const { return plan_; }

  const Store &store() const { return store_; }
  Store &store() { return store_; }

  /// Effective weight matrix, row-major out_dim x inputs().
  std::span<const double> weights() const;

  void forward(std::span<const double> x, std::span<double> z) const;
  void backward(std::span<const double> delta, std::span<double> out) const;
  UpdateStats update(std::span<const double> x, std::span<const double> delta, RandomStream &rng);

private:
  LayerSpec spec_;
  Store store_;
  PulsePlan plan_;
  double learning_rate_;
};

/// Per-layer buffers filled by forward_pass.
struct ForwardCache {
  std::uint64_t generation = 0;
  std::vector<std::vector<double>> inputs; // x per layer (with the bias entry when used)
  std::vector<std::vector<double>> pre;    // z = W x
  std::vector<std::vector<double>> post;   // a = phi(z)
};

/// delta[l] = dL/dz of layer l; the matching x is cache.inputs[l].
struct Gradients {
  std::vector<std::vector<double>> delta;
};

/// Multilayer perceptron a = phi(W x) over a float or crossbar backend.
class Network {
public:
  /// Weights start Kaiming-uniform (fan_in = in_dim); crossbar layers place
  /// them around g_center with the backend's k.
  Network(std::vector<LayerSpec> specs, Backend backend, RandomStream &init_rng);

  std::size_t input_dim() const { return layers_.front().spec().in_dim; }
  std::size_t output_dim() const { return layers_.back().spec().out_dim; }
  std::size_t depth() const { return layers_.size(); }
  bool is_crossbar() const { return std::holds_alternative<CrossbarBackend>(backend_); }
  const Backend &backend() const { return backend_; }

  const Layer &layer(std::size_t i) const { return layers_.at(i); }
  Layer &layer(std::size_t i) { return layers_.at(i); }

  /// Bumped on every weight change; caches from older generations are stale.
  std::uint64_t generation() const { return generation_; }
  void touch() { ++generation_; }

  double saturation_fraction() const;
  UpdateStats apply(const ForwardCache &cache, const Gradients &grads, RandomStream &rng);

  ForwardCache make_cache() const;
  Gradients make_gradients() const;

private:
  Backend backend_;
  std::vector<Layer> layers_;
  std::uint64_t generation_ = 0;
};

/// Runs the network on x; fills cache and returns the last layer's output.
/// Crossbar networks reject negative inputs.
std::span<const double> forward_pass(const Network &net, std::span<const double> x,
                                     ForwardCache &cache);
std::span<const double> forward_pass(const Network &net, std::span<const float> x,
                                     ForwardCache &cache);

struct ForwardResult {
  std::size_t prediction;
  ForwardCache cache;
};
ForwardResult forward_pass(const Network &net, std::span<const double> x);

/// loss_grad is dL/dz of the output layer (softmax + cross-entropy: y_hat - y).
/// Fills grads.delta for every layer; throws PreconditionError on a stale cache.
void backward_pass(const Network &net, std::span<const double> loss_grad,
                   const ForwardCache &cache, Gradients &grads);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

/// Softmax cross-entropy of the cached output against label.
double cross_entropy(std::span<const double> probabilities, std::size_t label);

struct Checkpoint {
  std::size_t images_seen = 0;
  double train_accuracy = 0.0; // online accuracy over the images since the last checkpoint
  double test_accuracy = -1.0; // -1 when no test set was given
  double saturation_fraction = 0.0;
  double wall_time = 0.0; // seconds since training started
};

struct TrainingLog {
  std::vector<Checkpoint> entries;
};

struct TrainOptions {
  std::size_t checkpoint_every = 5000; // 0 disables intermediate checkpoints
  const LabeledDataset *test = nullptr;
};

/// Running state carried across epochs of one training run.
class TrainingSession {
public:
  explicit TrainingSession(Network &net)
      : net_(net), cache_(net.make_cache()), grads_(net.make_gradients()),
        start_(std::chrono::steady_clock::now()) {}

  Network &network() { return net_; }
  std::size_t images_seen() const { return images_seen_; }
  const TrainingLog &log() const { return log_; }
  const UpdateStats &update_stats() const { return stats_; }

  /// One SGD step on a single sample; returns whether the pre-update
  /// prediction was correct.
  bool train_sample(std::span<const float> x, std::size_t label, RandomStream &rng);

  /// Appends a checkpoint with the current window accuracy.
  const Checkpoint &checkpoint(const LabeledDataset *test);

private:
  Network &net_;
  ForwardCache cache_;
  Gradients grads_;
  std::vector<double> loss_grad_;
  std::chrono::steady_clock::time_point start_;
  std::size_t images_seen_ = 0;
  std::size_t window_correct_ = 0;
  std::size_t window_count_ = 0;
  UpdateStats stats_;
  TrainingLog log_;
};

/// One shuffled pass of single-sample SGD with softmax cross-entropy.
/// Returns the checkpoints produced during the pass.
std::vector<Checkpoint> train_epoch(TrainingSession &session, const LabeledDataset &data,
                                    RandomStream &rng, const TrainOptions &options = {});

/// Fraction of samples whose argmax output matches the label.
double evaluate(const Network &net, const LabeledDataset &data);

} // namespace ctf
