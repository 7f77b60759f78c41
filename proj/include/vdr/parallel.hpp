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

#include <omp.h>

namespace vdr {

// Runs fn(i) for i in [0, n) on up to `jobs` threads (<=1 = serial).
// Callers write results by index, so output order never depends on the
// thread count.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_jobs() { return omp_get_max_threads(); }

}  // namespace vdr
