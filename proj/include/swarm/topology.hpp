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

#include <Eigen/Dense>
#include <vector>

namespace swarm {

/// Who each agent listens to (neighbor_sets, self always included and
/// listed first) and the transpose relation (deemed_sets: who listens to
/// each agent). Orderings are deterministic: self first, then ascending id.
struct Topology {
  int m = 0;
  std::vector<std::vector<int>> neighbor_sets;  // N_i
  std::vector<std::vector<int>> deemed_sets;    // P_i = {j : i in N_j}

  /// Position of agent j inside N_i, or -1.
  int block_of(int i, int j) const;
};

/// Neighborhoods from initial positions: self plus the (size-1) nearest
/// agents by Euclidean distance, ties broken by lower agent id.
/// size <= 0 selects the complete topology.
Topology build_topology(const std::vector<Eigen::Vector2d>& positions, int neighborhood_size);

}  // namespace swarm
