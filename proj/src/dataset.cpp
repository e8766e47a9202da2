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
#include "ctf/dataset.hpp"

#include "binary_io.hpp"
#include "ctf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ctf {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;
constexpr char kFeatureMagic[5] = "CTFF";
constexpr std::uint32_t kFeatureVersion = 1;

std::ifstream open_binary(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return in;
}

void expect_end(std::istream &in, const std::string &what) {
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(what + ": trailing bytes after payload");
  }
}

} // namespace

LabeledDataset LabeledDataset::head(std::size_t n) const {
  n = std::min(n, size());
  LabeledDataset out;
  out.n_features = n_features;
  out.n_classes = n_classes;
  out.features.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n * n_features));
  out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

LabeledDataset load_mnist(const std::filesystem::path &images, const std::filesystem::path &labels) {
  const std::string iw = "IDX images " + images.string();
  const std::string lw = "IDX labels " + labels.string();
  auto img = open_binary(images);
  auto lab = open_binary(labels);

  if (io::read_be<std::uint32_t>(img, iw) != kImageMagic) {
    throw FormatError(iw + ": bad magic (want 2051)");
  }
  const auto n_images = io::read_be<std::uint32_t>(img, iw);
  const auto height = io::read_be<std::uint32_t>(img, iw);
  const auto width = io::read_be<std::uint32_t>(img, iw);
  if (io::read_be<std::uint32_t>(lab, lw) != kLabelMagic) {
    throw FormatError(lw + ": bad magic (want 2049)");
  }
  const auto n_labels = io::read_be<std::uint32_t>(lab, lw);
  if (n_images != n_labels) {
    std::ostringstream os;
    os << "MNIST count mismatch: " << n_images << " images vs " << n_labels << " labels";
    throw FormatError(os.str());
  }

  LabeledDataset out;
  out.n_features = static_cast<std::size_t>(height) * width;
  out.n_classes = 10;
  std::vector<unsigned char> pixels(static_cast<std::size_t>(n_images) * out.n_features);
  if (!img.read(reinterpret_cast<char *>(pixels.data()), static_cast<std::streamsize>(pixels.size()))) {
    throw FormatError(iw + ": truncated pixel payload");
  }
  expect_end(img, iw);
  std::vector<unsigned char> raw_labels(n_labels);
  if (!lab.read(reinterpret_cast<char *>(raw_labels.data()), static_cast<std::streamsize>(raw_labels.size()))) {
    throw FormatError(lw + ": truncated label payload");
  }
  expect_end(lab, lw);

  out.features.resize(pixels.size());
  std::transform(pixels.begin(), pixels.end(), out.features.begin(),
                 [](unsigned char p) { return static_cast<float>(p) / 255.0f; });
  out.labels.resize(n_labels);
  for (std::size_t i = 0; i < n_labels; ++i) {
    if (raw_labels[i] > 9) {
      throw FormatError(lw + ": label out of range");
    }
    out.labels[i] = raw_labels[i];
  }
  return out;
}

LabeledDataset load_mnist_train(const std::filesystem::path &dir) {
  return load_mnist(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
}

LabeledDataset load_mnist_test(const std::filesystem::path &dir) {
  return load_mnist(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
}

bool mnist_available(const std::filesystem::path &dir) {
  for (const char *f : {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                        "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}) {
    if (!std::filesystem::is_regular_file(dir / f)) {
      return false;
    }
  }
  return true;
}

LabeledDataset load_features(const std::filesystem::path &path) {
  const std::string what = "feature file " + path.string();
  auto in = open_binary(path);
  io::expect_magic(in, kFeatureMagic, what);
  const auto version = io::read_le<std::uint32_t>(in, what);
  if (version != kFeatureVersion) {
    throw FormatError(what + ": unsupported version " + std::to_string(version));
  }
  const auto n_samples = io::read_le<std::uint32_t>(in, what);
  const auto n_features = io::read_le<std::uint32_t>(in, what);
  const auto n_classes = io::read_le<std::uint32_t>(in, what);
  if (n_samples == 0) {
    throw FormatError(what + ": empty dataset");
  }
  if (n_features == 0 || n_classes == 0) {
    throw FormatError(what + ": zero features or classes");
  }

  // Check the payload length against the header before allocating.
  const auto header_end = in.tellg();
  in.seekg(0, std::ios::end);
  const auto file_end = in.tellg();
  in.seekg(header_end);
  const std::uint64_t want = static_cast<std::uint64_t>(n_samples) * n_features * 4 +
                             static_cast<std::uint64_t>(n_samples) * 2;
  if (static_cast<std::uint64_t>(file_end - header_end) != want) {
    std::ostringstream os;
    os << what << ": payload is " << (file_end - header_end) << " bytes, header implies " << want;
    throw FormatError(os.str());
  }

  LabeledDataset out;
  out.n_features = n_features;
  out.n_classes = n_classes;
  out.features.resize(static_cast<std::size_t>(n_samples) * n_features);
  for (float &f : out.features) {
    f = io::read_le<float>(in, what);
    if (!std::isfinite(f) || f < 0.0f) {
      throw FormatError(what + ": negative or non-finite feature (features must be ReLU outputs)");
    }
  }
  out.labels.resize(n_samples);
  for (auto &l : out.labels) {
    l = io::read_le<std::uint16_t>(in, what);
    if (l >= n_classes) {
      throw FormatError(what + ": label out of range");
    }
  }
  return out;
}

void write_features(const std::filesystem::path &path, const LabeledDataset &data) {
  if (data.empty()) {
    throw PreconditionError("write_features: empty dataset");
  }
  if (data.features.size() != data.size() * data.n_features) {
    throw PreconditionError("write_features: feature matrix does not match sample count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError("cannot write " + path.string());
  }
  out.write(kFeatureMagic, 4);
  io::write_le<std::uint32_t>(out, kFeatureVersion);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.size()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.n_features));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.n_classes));
  for (float f : data.features) {
    io::write_le<float>(out, f);
  }
  for (auto l : data.labels) {
    io::write_le<std::uint16_t>(out, l);
  }
  if (!out) {
    throw FormatError("short write to " + path.string());
  }
}

} // namespace ctf
