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

#include "swarm/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarm {

int Topology::block_of(int i, int j) const {
  const auto& set = neighbor_sets[i];
  for (size_t b = 0; b < set.size(); ++b) {
    if (set[b] == j) return static_cast<int>(b);
  }
  return -1;
}

Topology build_topology(const std::vector<Eigen::Vector2d>& positions, int neighborhood_size) {
  const int m = static_cast<int>(positions.size());
  if (neighborhood_size > m) {
    throw std::invalid_argument("build_topology: neighborhood size exceeds agent count");
  }
  const int size = neighborhood_size <= 0 ? m : neighborhood_size;

  Topology topo;
  topo.m = m;
  topo.neighbor_sets.resize(m);
  topo.deemed_sets.assign(m, {});

  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(m - 1);
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      ranked.emplace_back((positions[j] - positions[i]).norm(), j);
    }
    std::sort(ranked.begin(), ranked.end());  // distance, then lower id

    std::vector<int> members;
    members.reserve(size);
    for (int r = 0; r < size - 1; ++r) members.push_back(ranked[r].second);
    std::sort(members.begin(), members.end());

    auto& set = topo.neighbor_sets[i];
    set.reserve(size);
    set.push_back(i);  // self first
    set.insert(set.end(), members.begin(), members.end());
  }

  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (topo.block_of(i, j) >= 0) topo.deemed_sets[j].push_back(i);
    }
  }
  return topo;
}

}  // namespace swarm
