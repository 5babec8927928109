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

#include <iosfwd>
#include <vector>

#include "swarm/model.hpp"
#include "swarm/topology.hpp"

namespace swarm {

/// Agent `from`'s safe copy of agent `about`'s trajectory and time, with
/// the consensus duals (and the sender's penalties) the global average
/// needs.
struct CopyMessage {
  int about = -1;
  int from = -1;
  std::vector<AgentState> state_copy;   // N+1
  double time_copy = 0.0;
  std::vector<Eigen::Vector3d> dual_y;  // N+1
  double dual_eta = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
};

/// Consensus variables for agent `about`, emitted only by that agent.
struct GlobalMessage {
  int about = -1;
  std::vector<AgentState> z;  // N+1
  double s = 0.0;
};

class SyncError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic in-memory bulk-synchronous exchange. Each call is one
/// communication round: it consumes every agent's posted batch at once
/// (the barrier), validates completeness against the topology, and routes.
/// Inboxes are sorted by sender id so replays are bit-identical.
class MessageBus {
 public:
  explicit MessageBus(const Topology& topo) : topo_(&topo) {}

  /// Routes copy messages: agent i must post one message about each
  /// j in N_i; agent j receives one message about j from every member of
  /// P_j. Throws SyncError naming the first agent with a bad batch.
  std::vector<std::vector<CopyMessage>> exchange_copies(
      int round, const std::vector<std::vector<CopyMessage>>& outgoing);

  /// Routes global messages: agent i posts exactly its own (about == i);
  /// each agent receives the globals of all members of its N_i.
  std::vector<std::vector<GlobalMessage>> exchange_globals(
      int round, const std::vector<GlobalMessage>& outgoing);

  /// Optional per-message trace: "round from about digest" lines.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  void check_round(int round);

  const Topology* topo_;
  int last_round_ = -1;
  std::ostream* trace_ = nullptr;
};

}  // namespace swarm
