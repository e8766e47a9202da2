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
#include "ctf/network.hpp"

#include "ctf/errors.hpp"
#include "ctf/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ctf {

namespace {

void activate(Activation act, std::span<const double> z, std::span<double> a) {
  switch (act) {
  case Activation::identity:
    std::copy(z.begin(), z.end(), a.begin());
    break;
  case Activation::relu:
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = z[i] > 0.0 ? z[i] : 0.0;
    }
    break;
  case Activation::softmax_output: {
    const double top = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = std::exp(z[i] - top);
      total += a[i];
    }
    for (double &v : a) {
      v /= total;
    }
    break;
  }
  }
}

template <typename T>
std::span<const double> run_forward(const Network &net, std::span<const T> x, ForwardCache &cache) {
  if (x.size() != net.input_dim()) {
    std::ostringstream os;
    os << "forward_pass: input has " << x.size() << " entries, network expects " << net.input_dim();
    throw PreconditionError(os.str());
  }
  if (cache.inputs.size() != net.depth()) {
    cache = net.make_cache();
  }
  auto &in0 = cache.inputs[0];
  const bool check_sign = net.is_crossbar();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = static_cast<double>(x[i]);
    if (check_sign && !(v >= 0.0)) {
      throw PreconditionError("forward_pass: crossbar inputs must be non-negative");
    }
    in0[i] = v;
  }
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const Layer &layer = net.layer(l);
    if (layer.spec().bias) {
      cache.inputs[l].back() = 1.0;
    }
    layer.forward(cache.inputs[l], cache.pre[l]);
    activate(layer.spec().activation, cache.pre[l], cache.post[l]);
    if (l + 1 < net.depth()) {
      std::copy(cache.post[l].begin(), cache.post[l].end(), cache.inputs[l + 1].begin());
    }
  }
  cache.generation = net.generation();
  return cache.post.back();
}

} // namespace

// -- DenseWeights ------------------------------------------------------------

void DenseWeights::forward(std::span<const double> x, std::span<double> y) const {
  simd::matvec(w_, rows_, cols_, x, y);
}

void DenseWeights::backward(std::span<const double> delta, std::span<double> out) const {
  simd::matvec_transposed(w_, rows_, cols_, delta, out);
}

void DenseWeights::update(std::span<const double> x, std::span<const double> delta,
                          double learning_rate) {
  for (std::size_t r = 0; r < rows_; ++r) {
    if (delta[r] != 0.0) {
      simd::axpy(-learning_rate * delta[r], x, std::span<double>(w_).subspan(r * cols_, cols_));
    }
  }
}

// -- Layer -------------------------------------------------------------------

std::span<const double> Layer::weights() const {
  return std::visit([](const auto &s) { return s.weights(); }, store_);
}

void Layer::forward(std::span<const double> x, std::span<double> z) const {
  std::visit([&](const auto &s) { s.forward(x, z); }, store_);
}

void Layer::backward(std::span<const double> delta, std::span<double> out) const {
  std::visit([&](const auto &s) { s.backward(delta, out); }, store_);
}

UpdateStats Layer::update(std::span<const double> x, std::span<const double> delta,
                          RandomStream &rng) {
  if (auto *arr = std::get_if<CrossbarArray>(&store_)) {
    return arr->stochastic_update(x, delta, plan_, rng);
  }
  std::get<DenseWeights>(store_).update(x, delta, learning_rate_);
  return {};
}

// -- Network -----------------------------------------------------------------

Network::Network(std::vector<LayerSpec> specs, Backend backend, RandomStream &init_rng)
    : backend_(std::move(backend)) {
  if (specs.empty()) {
    throw PreconditionError("network: need at least one layer");
  }
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec &s = specs[l];
    if (s.in_dim == 0 || s.out_dim == 0) {
      throw PreconditionError("network: layer dimensions must be >= 1");
    }
    if (l > 0 && specs[l - 1].out_dim != s.in_dim) {
      throw PreconditionError("network: consecutive layer dimensions do not chain");
    }
    if (s.activation == Activation::softmax_output && l + 1 != specs.size()) {
      throw PreconditionError("network: softmax is only allowed on the output layer");
    }
  }

  layers_.reserve(specs.size());
  for (const LayerSpec &s : specs) {
    const std::size_t cols = s.in_dim + (s.bias ? 1 : 0);
    const WeightSampler w0 = kaiming_uniform(s.in_dim);
    if (const auto *fb = std::get_if<FloatBackend>(&backend_)) {
      DenseWeights dense(s.out_dim, cols);
      for (double &w : dense.mutable_weights()) {
        w = w0(init_rng);
      }
      layers_.emplace_back(s, std::move(dense), PulsePlan{}, fb->learning_rate);
    } else {
      const auto &cb = std::get<CrossbarBackend>(backend_);
      if (!cb.device) {
        throw PreconditionError("network: crossbar backend without device model");
      }
      PulsePlan plan{cb.train_length, compute_input_scale(cb.alpha, cb.train_length, cb.k, *cb.device),
                     cb.cycle};
      layers_.emplace_back(s, initialize(s.out_dim, cols, cb.k, cb.device, w0, init_rng), plan,
                           cb.alpha);
    }
  }
}

double Network::saturation_fraction() const {
  double edge = 0.0;
  double devices = 0.0;
  for (const Layer &layer : layers_) {
    if (const auto *arr = std::get_if<CrossbarArray>(&layer.store())) {
      const double n = 2.0 * static_cast<double>(arr->rows() * arr->cols());
      edge += arr->saturation_fraction() * n;
      devices += n;
    }
  }
  return devices > 0.0 ? edge / devices : 0.0;
}

UpdateStats Network::apply(const ForwardCache &cache, const Gradients &grads, RandomStream &rng) {
  UpdateStats stats;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    stats += layers_[l].update(cache.inputs[l], grads.delta[l], rng);
  }
  touch();
  return stats;
}

ForwardCache Network::make_cache() const {
  ForwardCache cache;
  for (const Layer &layer : layers_) {
    cache.inputs.emplace_back(layer.inputs(), 0.0);
    cache.pre.emplace_back(layer.spec().out_dim, 0.0);
    cache.post.emplace_back(layer.spec().out_dim, 0.0);
  }
  cache.generation = ~std::uint64_t{0};
  return cache;
}

Gradients Network::make_gradients() const {
  Gradients g;
  for (const Layer &layer : layers_) {
    g.delta.emplace_back(layer.spec().out_dim, 0.0);
  }
  return g;
}

// -- passes ------------------------------------------------------------------

std::span<const double> forward_pass(const Network &net, std::span<const double> x,
                                     ForwardCache &cache) {
  return run_forward(net, x, cache);
}

std::span<const double> forward_pass(const Network &net, std::span<const float> x,
                                     ForwardCache &cache) {
  return run_forward(net, x, cache);
}

ForwardResult forward_pass(const Network &net, std::span<const double> x) {
  ForwardResult result{0, net.make_cache()};
  result.prediction = argmax(forward_pass(net, x, result.cache));
  return result;
}

void backward_pass(const Network &net, std::span<const double> loss_grad,
                   const ForwardCache &cache, Gradients &grads) {
  if (cache.generation != net.generation() || cache.inputs.size() != net.depth()) {
    throw PreconditionError("backward_pass: cache does not match the current weights");
  }
  if (loss_grad.size() != net.output_dim()) {
    throw PreconditionError("backward_pass: loss gradient has the wrong length");
  }
  if (grads.delta.size() != net.depth()) {
    grads = net.make_gradients();
  }
  std::copy(loss_grad.begin(), loss_grad.end(), grads.delta.back().begin());
  std::vector<double> back;
  for (std::size_t l = net.depth() - 1; l > 0; --l) {
    const Layer &layer = net.layer(l);
    back.resize(layer.inputs());
    layer.backward(grads.delta[l], back);
    const Activation act = net.layer(l - 1).spec().activation;
    const auto &z = cache.pre[l - 1];
    auto &d = grads.delta[l - 1];
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double slope = act == Activation::relu ? (z[i] > 0.0 ? 1.0 : 0.0) : 1.0;
      d[i] = back[i] * slope;
    }
  }
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double cross_entropy(std::span<const double> probabilities, std::size_t label) {
  return -std::log(std::max(probabilities[label], 1e-300));
}

// -- training ----------------------------------------------------------------

bool TrainingSession::train_sample(std::span<const float> x, std::size_t label, RandomStream &rng) {
  const auto out = forward_pass(net_, x, cache_);
  const bool correct = argmax(out) == label;
  loss_grad_.assign(out.begin(), out.end());
  loss_grad_[label] -= 1.0;
  backward_pass(net_, loss_grad_, cache_, grads_);
  stats_ += net_.apply(cache_, grads_, rng);
  ++images_seen_;
  ++window_count_;
  window_correct_ += correct ? 1 : 0;
  return correct;
}

const Checkpoint &TrainingSession::checkpoint(const LabeledDataset *test) {
  Checkpoint cp;
  cp.images_seen = images_seen_;
  cp.train_accuracy = window_count_ > 0 ? static_cast<double>(window_correct_) / window_count_ : 0.0;
  cp.test_accuracy = test != nullptr ? evaluate(net_, *test) : -1.0;
  cp.saturation_fraction = net_.saturation_fraction();
  cp.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  window_correct_ = 0;
  window_count_ = 0;
  log_.entries.push_back(cp);
  return log_.entries.back();
}

std::vector<Checkpoint> train_epoch(TrainingSession &session, const LabeledDataset &data,
                                    RandomStream &rng, const TrainOptions &options) {
  if (data.empty()) {
    throw PreconditionError("train_epoch: empty dataset");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<Checkpoint> produced;
  for (std::size_t idx : order) {
    session.train_sample(data.row(idx), data.labels[idx], rng);
    if (options.checkpoint_every > 0 && session.images_seen() % options.checkpoint_every == 0) {
      produced.push_back(session.checkpoint(options.test));
    }
  }
  return produced;
}

double evaluate(const Network &net, const LabeledDataset &data) {
  if (data.empty()) {
    throw PreconditionError("evaluate: empty dataset");
  }
  ForwardCache cache = net.make_cache();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    correct += argmax(forward_pass(net, data.row(i), cache)) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace ctf
