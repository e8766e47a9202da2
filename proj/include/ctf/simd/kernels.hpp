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
#include <span>
#include <string_view>

// Dense inner loops shared by the crossbar reads and the float baseline.
//
// Each kernel exists as a scalar reference and, where the CPU allows, an
// AVX2/FMA variant. The variant is picked once at first use: the best one the
// CPU supports, unless the CTF_SIMD environment variable names another
// ("scalar" or "avx2"). Variants agree to rounding, not bit for bit, so a
// seeded run is reproducible for a fixed selection only.

namespace ctf::simd {

struct KernelTable {
  std::string_view name;
  // y[r] = sum_c w[r * cols + c] * x[c]
  void (*matvec)(const double *w, std::size_t rows, std::size_t cols, const double *x, double *y);
  // y[c] = sum_r w[r * cols + c] * d[r]
  void (*matvec_transposed)(const double *w, std::size_t rows, std::size_t cols, const double *d,
                            double *y);
  // y += a * x
  void (*axpy)(double a, const double *x, double *y, std::size_t n);
  // out = k * (a - b); exact (no fused ops), so every variant matches the scalar one.
  void (*scaled_difference)(double k, const double *a, const double *b, double *out,
                            std::size_t n);
  double (*dot)(const double *a, const double *b, std::size_t n);
};

const KernelTable &scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable *avx2_kernels();

/// The table used by the rest of the library.
const KernelTable &active_kernels();

/// Overrides the selection (tests and benchmarks). Returns false if unavailable.
bool select_kernels(std::string_view name);

// Span front-ends on the active table. Sizes are checked by the callers that
// own the shapes; these only assert.
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_transposed(std::span<const double> w, std::size_t rows, std::size_t cols,
                       std::span<const double> d, std::span<double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scaled_difference(double k, std::span<const double> a, std::span<const double> b,
                       std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);

} // namespace ctf::simd
