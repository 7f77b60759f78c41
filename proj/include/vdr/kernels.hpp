// Copyright 2026 The vdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

namespace vdr::kernels {

// Dense double-precision kernels for the recurrent nets. The OpenMP
// versions parallelize over independent output elements only, so they are
// bitwise identical to the serial references in vdr::kernels::serial
// (asserted in tests, compared in the bench_kernels tool).

// Work sizes below this stay serial; OpenMP fork/join costs more than the
// loop at small dims.
inline constexpr std::size_t kParallelThreshold = 16 * 1024;

namespace serial {

// y = W x, W row-major rows x cols
inline void matvec(const double* W, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = W + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// y += W x
inline void matvec_acc(const double* W, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = W + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// y += W^T x  (x has `rows` entries, y has `cols`)
inline void matvec_t_acc(const double* W, const double* x, double* y,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += W[r * cols + c] * x[r];
    y[c] += acc;
  }
}

// W += a b^T  (a has `rows` entries, b has `cols`)
inline void rank1_acc(double* W, const double* a, const double* b,
                      std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = W + r * cols;
    const double ar = a[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

}  // namespace serial

inline void matvec(const double* W, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = W + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

inline void matvec_acc(const double* W, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    const double* row = W + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

inline void matvec_t_acc(const double* W, const double* x, double* y,
                         std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += W[r * cols + c] * x[r];
    y[c] += acc;
  }
}

inline void rank1_acc(double* W, const double* a, const double* b,
                      std::size_t rows, std::size_t cols) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = W + r * cols;
    const double ar = a[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

}  // namespace vdr::kernels
