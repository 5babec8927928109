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

#include "swarm/bus.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <string>

namespace swarm {

namespace {

// FNV-1a over the payload doubles; used only for the debug trace.
uint64_t digest(std::initializer_list<const double*> blocks,
                std::initializer_list<size_t> counts) {
  uint64_t h = 1469598103934665603ULL;
  auto cit = counts.begin();
  for (const double* block : blocks) {
    const size_t count = *cit++;
    const auto* bytes = reinterpret_cast<const unsigned char*>(block);
    for (size_t b = 0; b < count * sizeof(double); ++b) {
      h ^= bytes[b];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

uint64_t digest_copy(const CopyMessage& msg) {
  return digest({msg.state_copy.empty() ? nullptr : msg.state_copy[0].data(), &msg.time_copy,
                 msg.dual_y.empty() ? nullptr : msg.dual_y[0].data(), &msg.dual_eta},
                {3 * msg.state_copy.size(), 1, 3 * msg.dual_y.size(), 1});
}

uint64_t digest_global(const GlobalMessage& msg) {
  return digest({msg.z.empty() ? nullptr : msg.z[0].data(), &msg.s}, {3 * msg.z.size(), 1});
}

}  // namespace

void MessageBus::check_round(int round) {
  if (round != last_round_ + 1) {
    throw SyncError("bus: round " + std::to_string(round) + " out of order (expected " +
                    std::to_string(last_round_ + 1) + ")");
  }
  last_round_ = round;
}

std::vector<std::vector<CopyMessage>> MessageBus::exchange_copies(
    int round, const std::vector<std::vector<CopyMessage>>& outgoing) {
  check_round(round);
  const int m = topo_->m;
  if (static_cast<int>(outgoing.size()) != m) {
    throw SyncError("bus: copy round " + std::to_string(round) + " missing poster (got " +
                    std::to_string(outgoing.size()) + " of " + std::to_string(m) + " batches)");
  }

  std::vector<std::vector<CopyMessage>> inbox(m);
  for (int i = 0; i < m; ++i) {
    const auto& batch = outgoing[i];
    const auto& expected = topo_->neighbor_sets[i];
    if (batch.size() != expected.size()) {
      throw SyncError("bus: agent " + std::to_string(i) + " posted " +
                      std::to_string(batch.size()) + " copies, expected " +
                      std::to_string(expected.size()));
    }
    for (const CopyMessage& msg : batch) {
      if (msg.from != i || topo_->block_of(i, msg.about) < 0) {
        throw SyncError("bus: agent " + std::to_string(i) + " posted a copy with bad addressing");
      }
      inbox[msg.about].push_back(msg);
      if (trace_ != nullptr) {
        *trace_ << "copy round=" << round << " from=" << msg.from << " about=" << msg.about
                << " digest=" << std::hex << digest_copy(msg) << std::dec << "\n";
      }
    }
  }
  for (auto& box : inbox) {
    std::sort(box.begin(), box.end(),
              [](const CopyMessage& a, const CopyMessage& b) { return a.from < b.from; });
  }
  return inbox;
}

std::vector<std::vector<GlobalMessage>> MessageBus::exchange_globals(
    int round, const std::vector<GlobalMessage>& outgoing) {
  check_round(round);
  const int m = topo_->m;
  if (static_cast<int>(outgoing.size()) != m) {
    throw SyncError("bus: global round " + std::to_string(round) + " missing poster");
  }
  for (int i = 0; i < m; ++i) {
    if (outgoing[i].about != i) {
      throw SyncError("bus: agent " + std::to_string(i) + " posted a foreign global");
    }
    if (trace_ != nullptr) {
      *trace_ << "global round=" << round << " from=" << i << " about=" << i
              << " digest=" << std::hex << digest_global(outgoing[i]) << std::dec << "\n";
    }
  }

  std::vector<std::vector<GlobalMessage>> inbox(m);
  for (int i = 0; i < m; ++i) {
    for (int j : topo_->neighbor_sets[i]) {
      inbox[i].push_back(outgoing[j]);
    }
    std::sort(inbox[i].begin(), inbox[i].end(),
              [](const GlobalMessage& a, const GlobalMessage& b) { return a.about < b.about; });
  }
  return inbox;
}

}  // namespace swarm
