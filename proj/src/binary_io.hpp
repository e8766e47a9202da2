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

// Explicit little-endian / big-endian field codecs for the on-disk formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "ctf/errors.hpp"

namespace ctf::io {

template <typename T> T byteswap_value(T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
    std::swap(b[i], b[sizeof(T) - 1 - i]);
  }
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

template <typename T> void write_le(std::ostream &out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = byteswap_value(v);
  }
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T> T read_le(std::istream &in, const std::string &what) {
  T v{};
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(T))) {
    throw FormatError("truncated " + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    v = byteswap_value(v);
  }
  return v;
}

template <typename T> T read_be(std::istream &in, const std::string &what) {
  T v{};
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(T))) {
    throw FormatError("truncated " + what);
  }
  if constexpr (std::endian::native == std::endian::little) {
    v = byteswap_value(v);
  }
  return v;
}

inline void expect_magic(std::istream &in, const char (&magic)[5], const std::string &what) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw FormatError(what + ": bad magic");
  }
}

} // namespace ctf::io
