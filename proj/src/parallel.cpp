/*
 * Copyright 2026 The swarm-pddp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "swarm/parallel.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace swarm {

int worker_count(int requested) {
  if (requested > 0) return requested;
  int cap = 0;
  if (const char* env = std::getenv("SWARM_PDDP_THREADS")) {
    cap = std::atoi(env);
  }
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (cap > 0) n = std::min(n, cap);
  return std::max(1, n);
#else
  return cap > 0 ? 1 : 1;
#endif
}

namespace detail {

void run_indexed(int n, int workers, void (*trampoline)(void*, int), void* ctx) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) trampoline(ctx, i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int i = 0; i < n; ++i) trampoline(ctx, i);
#else
  for (int i = 0; i < n; ++i) trampoline(ctx, i);
#endif
}

}  // namespace detail
}  // namespace swarm
