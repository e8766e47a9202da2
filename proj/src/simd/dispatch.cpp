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
#include "kernels_impl.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

namespace ctf::simd {

namespace {

bool cpu_has_avx2() {
#if defined(CTF_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable *initial_selection() {
  const KernelTable *best = avx2_kernels();
  if (best == nullptr) {
    best = &scalar_kernels();
  }
  if (const char *env = std::getenv("CTF_SIMD")) {
    const std::string want(env);
    if (want == "scalar") {
      return &scalar_kernels();
    }
    if (want == "avx2" && avx2_kernels() != nullptr) {
      return avx2_kernels();
    }
  }
  return best;
}

std::atomic<const KernelTable *> &current() {
  static std::atomic<const KernelTable *> table{initial_selection()};
  return table;
}

} // namespace

const KernelTable &scalar_kernels() { return detail::scalar_table(); }

const KernelTable *avx2_kernels() {
#if defined(CTF_HAVE_AVX2_KERNELS)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable &active_kernels() { return *current().load(std::memory_order_relaxed); }

bool select_kernels(std::string_view name) {
  if (name == "scalar") {
    current().store(&scalar_kernels());
    return true;
  }
  if (name == "avx2" && avx2_kernels() != nullptr) {
    current().store(avx2_kernels());
    return true;
  }
  return false;
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  assert(w.size() == rows * cols && x.size() == cols && y.size() == rows);
  active_kernels().matvec(w.data(), rows, cols, x.data(), y.data());
}

void matvec_transposed(std::span<const double> w, std::size_t rows, std::size_t cols,
                       std::span<const double> d, std::span<double> y) {
  assert(w.size() == rows * cols && d.size() == rows && y.size() == cols);
  active_kernels().matvec_transposed(w.data(), rows, cols, d.data(), y.data());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_kernels().axpy(a, x.data(), y.data(), x.size());
}

void scaled_difference(double k, std::span<const double> a, std::span<const double> b,
                       std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active_kernels().scaled_difference(k, a.data(), b.data(), out.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

} // namespace ctf::simd
