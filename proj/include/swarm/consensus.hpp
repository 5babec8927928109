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

#include <array>
#include <memory>
#include <optional>

#include "swarm/bus.hpp"
#include "swarm/pddp.hpp"
#include "swarm/scenario.hpp"

namespace swarm {

class PenaltyScheme;

/// Everything one agent owns across the distributed iteration. Stack
/// containers are indexed [block][instant] where block 0 is always the
/// agent itself and the remaining blocks follow its neighbor-set order.
struct AgentVars {
  AgentTrajectory local;  // X_i, U_i, t_i (step-1 output)

  std::vector<Control> u_tilde;                        // safe control copy
  std::vector<std::vector<AgentState>> x_copy;         // safe state stacks
  std::vector<double> t_copy;                          // safe time stack
  std::vector<std::vector<AgentState>> z_cache;        // neighbor globals
  std::vector<double> s_cache;

  std::vector<double> zeta;             // control duals, N
  std::vector<Eigen::Vector3d> lambda;  // state duals, N+1
  double nu = 0.0;                      // time dual
  std::vector<std::vector<Eigen::Vector3d>> y;  // stack duals [block][instant]
  std::vector<double> eta;                      // time-stack duals [block]

  double tau = 0.0, rho = 0.0, mu = 0.0, sigma = 0.0, gamma = 0.0;

  bool step1_converged = true;
  bool qp_feasible = true;
};

struct ConsensusState {
  std::vector<AgentVars> agents;
  int iteration = 0;
};

/// The five consensus families, in the fixed order used everywhere a
/// penalty/residual quintuple appears.
enum Family : int { kFamU = 0, kFamX, kFamXa, kFamT, kFamTa, kFamilyCount };

inline constexpr std::array<const char*, kFamilyCount> kFamilyNames = {"u", "x", "xa", "t", "ta"};

struct FamilyStats {
  double primal = 0.0;      // |r^p|
  double dual = 0.0;        // |r^d|
  double dual_stack = 0.0;  // norm of the stacked dual variable
  double dim = 0.0;
};

struct ResidualReport {
  std::array<FamilyStats, kFamilyCount> fam;
};

/// Norms of the two iterate stacks entering each family's relative
/// stopping term.
struct IterateNorms {
  std::array<double, kFamilyCount> lhs{};
  std::array<double, kFamilyCount> rhs{};
};

struct IterationTraceRow {
  int iteration = 0;
  std::vector<double> t_finals;
  std::vector<std::array<double, kFamilyCount>> penalties;  // per agent
  ResidualReport report;
  bool stopped = false;
  bool na_restart = false;
};

struct SwarmSolution {
  std::vector<AgentTrajectory> trajectories;
  std::vector<IterationTraceRow> trace;
  bool converged = false;
  int iterations = 0;
  double wall_seconds = 0.0;  // informative only; never serialized
  std::string scheme;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The distributed consensus engine: warm start by per-agent plain DDP,
/// then iterate (1) local augmented PDDP solves, (2) per-instant safe-copy
/// projections, (3) global averaging over deemed neighbors, dual ascent,
/// penalty adaptation, residual bookkeeping, and the stopping test.
///
/// Steps 1 and 2 run agents in parallel; the bus imposes the round
/// barriers. Residuals are gathered centrally as run telemetry.
class Engine {
 public:
  struct Options {
    int threads = 0;                    // 0: SWARM_PDDP_THREADS or OpenMP default
    std::ostream* bus_trace = nullptr;  // per-message log when non-null
    int step1_max_inner = 10;
    double step1_alpha = 0.4;
    bool step1_line_search = false;
  };

  explicit Engine(ScenarioConfig scenario);
  Engine(ScenarioConfig scenario, Options options);

  const ScenarioConfig& scenario() const { return scenario_; }
  const Topology& topology() const { return topo_; }

  /// Plain per-agent DDP (coupling and obstacles ignored, time frozen),
  /// copies initialized to the exchanged locals, globals to the copies,
  /// duals to zero. Throws EngineError naming the agent on failure.
  ConsensusState warm_start();

  void step1_all(ConsensusState& state);
  void step2_all(ConsensusState& state);
  /// Copy exchange, deemed-neighbor averaging, and the global broadcast.
  void step3_global(ConsensusState& state);
  void dual_update_all(ConsensusState& state);

  /// Residual norms for iteration n given the state at the top of the
  /// iteration. Per-agent penalties scale each agent's block.
  ResidualReport residuals(const ConsensusState& state, const ConsensusState& prev,
                           IterateNorms* norms = nullptr) const;

  static bool check_stop(const ResidualReport& report, const StopCriteria& criteria,
                         const IterateNorms& norms);

  SwarmSolution run(PenaltyScheme& scheme);

 private:
  void init_agent_containers(ConsensusState& state);

  ScenarioConfig scenario_;
  Options options_;
  Topology topo_;
  MessageBus bus_;
  int next_round_ = 0;
  std::vector<CostWeights> weights_;
  std::vector<std::optional<qp::TimeSequenceSpec>> time_specs_;
};

}  // namespace swarm
