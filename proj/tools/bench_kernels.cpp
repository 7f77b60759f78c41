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

// Compares the OpenMP kernels against the serial references: verifies
// bitwise-identical outputs, then reports timings per size.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "vdr/kernels.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double run_ms(int reps, const auto& fn) {
  const auto t0 = clock_type::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0)
             .count() /
         reps;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%8s %8s %12s %12s %12s %8s\n", "rows", "cols", "kernel",
              "serial(ms)", "openmp(ms)", "match");

  std::mt19937_64 rng(1234);
  const auto rand_vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v)
      x = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0) - 0.5;
    return v;
  };

  bool all_match = true;
  for (const auto [rows, cols] : {std::pair<std::size_t, std::size_t>{64, 64},
                                  {256, 256},
                                  {1024, 512},
                                  {4096, 512}}) {
    const auto W = rand_vec(rows * cols);
    const auto x = rand_vec(cols);
    const auto xr = rand_vec(rows);
    std::vector<double> y_serial(rows), y_omp(rows);
    std::vector<double> yt_serial(cols), yt_omp(cols);
    const int reps = rows * cols > 500000 ? 50 : 400;

    const double t_serial = run_ms(reps, [&] {
      vdr::kernels::serial::matvec(W.data(), x.data(), y_serial.data(), rows,
                                   cols);
    });
    const double t_omp = run_ms(reps, [&] {
      vdr::kernels::matvec(W.data(), x.data(), y_omp.data(), rows, cols);
    });
    const bool match = y_serial == y_omp;
    all_match = all_match && match;
    std::printf("%8zu %8zu %12s %12.4f %12.4f %8s\n", rows, cols, "matvec",
                t_serial, t_omp, match ? "yes" : "NO");

    std::fill(yt_serial.begin(), yt_serial.end(), 0.0);
    std::fill(yt_omp.begin(), yt_omp.end(), 0.0);
    const double tt_serial = run_ms(reps, [&] {
      vdr::kernels::serial::matvec_t_acc(W.data(), xr.data(), yt_serial.data(),
                                         rows, cols);
    });
    const double tt_omp = run_ms(reps, [&] {
      vdr::kernels::matvec_t_acc(W.data(), xr.data(), yt_omp.data(), rows,
                                 cols);
    });
    const bool tmatch = yt_serial == yt_omp;
    all_match = all_match && tmatch;
    std::printf("%8zu %8zu %12s %12.4f %12.4f %8s\n", rows, cols, "matvec_t",
                tt_serial, tt_omp, tmatch ? "yes" : "NO");

    auto W1 = rand_vec(rows * cols);
    auto W2 = W1;
    const auto a = rand_vec(rows);
    const auto b = rand_vec(cols);
    const double r_serial = run_ms(reps, [&] {
      vdr::kernels::serial::rank1_acc(W1.data(), a.data(), b.data(), rows,
                                      cols);
    });
    const double r_omp = run_ms(reps, [&] {
      vdr::kernels::rank1_acc(W2.data(), a.data(), b.data(), rows, cols);
    });
    const bool rmatch = W1 == W2;
    all_match = all_match && rmatch;
    std::printf("%8zu %8zu %12s %12.4f %12.4f %8s\n", rows, cols, "rank1",
                r_serial, r_omp, rmatch ? "yes" : "NO");
  }
  std::printf("%s\n", all_match ? "all kernels match serial reference"
                                : "MISMATCH DETECTED");
  return all_match ? 0 : 1;
}
