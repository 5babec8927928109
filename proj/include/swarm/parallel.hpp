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

#pragma once

#include <utility>

namespace swarm {

/// Resolves the worker count for parallel agent loops.
///
/// `requested > 0` wins; otherwise the SWARM_PDDP_THREADS environment
/// variable caps the OpenMP default. Returns 1 when built without OpenMP.
int worker_count(int requested = 0);

namespace detail {
void run_indexed(int n, int workers, void (*trampoline)(void*, int), void* ctx);
}

/// Runs fn(0..n-1) across `workers` threads. workers <= 1 executes the
/// serial reference path (a plain loop, no OpenMP region). Bodies must
/// write only to index-disjoint slots so both paths are bit-identical.
template <class F>
void parallel_for(int n, int workers, F&& fn) {
  auto trampoline = [](void* ctx, int i) { (*static_cast<F*>(ctx))(i); };
  detail::run_indexed(n, workers, trampoline, &fn);
}

}  // namespace swarm
