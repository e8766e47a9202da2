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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ctf {

/// Row-major non-negative features with integer labels in [0, n_classes).
struct LabeledDataset {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<float> features;
  std::vector<std::uint16_t> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const float> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
  /// First n samples (or all of them), in file order.
  LabeledDataset head(std::size_t n) const;
};

/// IDX image/label pair (magic 2051 / 2049). Pixels are scaled by 1/255.
LabeledDataset load_mnist(const std::filesystem::path &images, const std::filesystem::path &labels);

/// Conventional file names inside an MNIST directory.
LabeledDataset load_mnist_train(const std::filesystem::path &dir);
LabeledDataset load_mnist_test(const std::filesystem::path &dir);
bool mnist_available(const std::filesystem::path &dir);

// Feature files ("CTFF"): little-endian header {magic, version u32, n_samples u32,
// n_features u32, n_classes u32}, then n_samples*n_features f32, then n_samples u16 labels.
LabeledDataset load_features(const std::filesystem::path &path);
void write_features(const std::filesystem::path &path, const LabeledDataset &data);

} // namespace ctf
