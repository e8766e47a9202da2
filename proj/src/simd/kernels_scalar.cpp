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

namespace ctf::simd::detail {

namespace {

double dot_scalar(const double *a, const double *b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

void matvec_scalar(const double *w, std::size_t rows, std::size_t cols, const double *x,
                   double *y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = dot_scalar(w + r * cols, x, cols);
  }
}

void axpy_scalar(double a, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void matvec_transposed_scalar(const double *w, std::size_t rows, std::size_t cols,
                              const double *d, double *y) {
  for (std::size_t c = 0; c < cols; ++c) {
    y[c] = 0.0;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (d[r] != 0.0) {
      axpy_scalar(d[r], w + r * cols, y, cols);
    }
  }
}

void scaled_difference_scalar(double k, const double *a, const double *b, double *out,
                              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = k * (a[i] - b[i]);
  }
}

} // namespace

const KernelTable &scalar_table() {
  static const KernelTable table{"scalar",           matvec_scalar, matvec_transposed_scalar,
                                 axpy_scalar,        scaled_difference_scalar, dot_scalar};
  return table;
}

} // namespace ctf::simd::detail
