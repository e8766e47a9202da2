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
#include "ctf/errors.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace ctf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "ctf_dataset_test";
  fs::create_directories(dir);
  return dir / name;
}

void put_be32(std::ofstream &out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

void write_idx(const fs::path &images, const fs::path &labels, std::uint32_t n,
               std::uint32_t image_magic = 2051, std::uint32_t label_count = 0,
               bool extra_byte = false) {
  std::ofstream img(images, std::ios::binary);
  put_be32(img, image_magic);
  put_be32(img, n);
  put_be32(img, 2);
  put_be32(img, 3);
  for (std::uint32_t i = 0; i < n * 6; ++i) {
    img.put(static_cast<char>((i * 51) % 256));
  }
  if (extra_byte) {
    img.put(0);
  }
  std::ofstream lab(labels, std::ios::binary);
  put_be32(lab, 2049);
  put_be32(lab, label_count ? label_count : n);
  for (std::uint32_t i = 0; i < (label_count ? label_count : n); ++i) {
    lab.put(static_cast<char>(i % 10));
  }
}

void put_le32(std::ofstream &out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

} // namespace

TEST_CASE("IDX pair loads and scales pixels") {
  write_idx(scratch("img"), scratch("lab"), 4);
  const LabeledDataset d = load_mnist(scratch("img"), scratch("lab"));
  CHECK(d.size() == 4);
  CHECK(d.n_features == 6);
  CHECK(d.n_classes == 10);
  CHECK(d.row(0)[1] == doctest::Approx(51.0f / 255.0f));
  CHECK(d.row(1)[0] == doctest::Approx((6 * 51 % 256) / 255.0f));
  CHECK(d.labels[3] == 3);
  for (float v : d.features) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  const LabeledDataset h = d.head(2);
  CHECK(h.size() == 2);
  CHECK(h.features.size() == 12);
  CHECK(d.head(100).size() == 4);
}

TEST_CASE("IDX error cases") {
  write_idx(scratch("img"), scratch("lab"), 3, 2049);
  CHECK_THROWS_AS(load_mnist(scratch("img"), scratch("lab")), FormatError);
  write_idx(scratch("img"), scratch("lab"), 3, 2051, 4);
  CHECK_THROWS_AS(load_mnist(scratch("img"), scratch("lab")), FormatError);
  write_idx(scratch("img"), scratch("lab"), 3, 2051, 0, true);
  CHECK_THROWS_AS(load_mnist(scratch("img"), scratch("lab")), FormatError);
  CHECK_THROWS_AS(load_mnist(scratch("missing"), scratch("lab")), FormatError);
  {
    std::ofstream img(scratch("img"), std::ios::binary);
    put_be32(img, 2051);
    put_be32(img, 10);
    put_be32(img, 28);
    put_be32(img, 28);
    img.put(1);
  }
  CHECK_THROWS_AS(load_mnist(scratch("img"), scratch("lab")), FormatError);
  CHECK_FALSE(mnist_available(scratch("nowhere")));
}

TEST_CASE("feature file round trip") {
  LabeledDataset d;
  d.n_features = 3;
  d.n_classes = 4;
  d.features = {0.0f, 1.5f, 2.25f, 3.0f, 0.0f, 7.125f};
  d.labels = {3, 1};
  write_features(scratch("f.ctff"), d);
  CHECK(fs::file_size(scratch("f.ctff")) == 20 + 6 * 4 + 2 * 2);
  const LabeledDataset back = load_features(scratch("f.ctff"));
  CHECK(back.n_features == 3);
  CHECK(back.n_classes == 4);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
}

TEST_CASE("feature file byte layout") {
  {
    std::ofstream out(scratch("g.ctff"), std::ios::binary);
    out.write("CTFF", 4);
    put_le32(out, 1);
    put_le32(out, 1);
    put_le32(out, 2);
    put_le32(out, 10);
    const float f[2] = {0.5f, 4.0f};
    out.write(reinterpret_cast<const char *>(f), sizeof f);
    out.put(7);
    out.put(0);
  }
  const LabeledDataset d = load_features(scratch("g.ctff"));
  CHECK(d.size() == 1);
  CHECK(d.row(0)[1] == 4.0f);
  CHECK(d.labels[0] == 7);
}

TEST_CASE("feature file error cases") {
  LabeledDataset d;
  d.n_features = 2;
  d.n_classes = 2;
  d.features = {0.5f, -1.0f};
  d.labels = {1};
  write_features(scratch("neg.ctff"), d);
  CHECK_THROWS_AS(load_features(scratch("neg.ctff")), FormatError);

  d.features = {0.5f, 1.0f};
  d.labels = {5};
  write_features(scratch("lab.ctff"), d);
  CHECK_THROWS_AS(load_features(scratch("lab.ctff")), FormatError);

  d.labels = {1};
  write_features(scratch("ok.ctff"), d);
  fs::resize_file(scratch("ok.ctff"), fs::file_size(scratch("ok.ctff")) - 1);
  CHECK_THROWS_AS(load_features(scratch("ok.ctff")), FormatError);

  {
    std::ofstream out(scratch("empty.ctff"), std::ios::binary);
    out.write("CTFF", 4);
    put_le32(out, 1);
    put_le32(out, 0);
    put_le32(out, 2);
    put_le32(out, 2);
  }
  CHECK_THROWS_AS(load_features(scratch("empty.ctff")), FormatError);
  {
    std::ofstream out(scratch("magic.ctff"), std::ios::binary);
    out.write("CTFX", 4);
  }
  CHECK_THROWS_AS(load_features(scratch("magic.ctff")), FormatError);
  CHECK_THROWS_AS(write_features(scratch("x.ctff"), LabeledDataset{}), PreconditionError);
}

TEST_CASE("official MNIST files") {
#ifdef CTF_TEST_MNIST_DIR
  const fs::path dir = CTF_TEST_MNIST_DIR;
#else
  const fs::path dir = "data/mnist";
#endif
  if (!mnist_available(dir)) {
    MESSAGE("MNIST not found in " << dir << "; skipped");
    return;
  }
  const LabeledDataset train = load_mnist_train(dir);
  const LabeledDataset test = load_mnist_test(dir);
  CHECK(train.size() == 60000);
  CHECK(test.size() == 10000);
  CHECK(train.n_features == 784);
  CHECK(std::vector<std::uint16_t>(train.labels.begin(), train.labels.begin() + 5) ==
        std::vector<std::uint16_t>{5, 0, 4, 1, 9});
}
