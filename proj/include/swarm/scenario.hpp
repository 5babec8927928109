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

#include <optional>
#include <string>
#include <vector>

#include "swarm/cost.hpp"
#include "swarm/model.hpp"
#include "swarm/qp.hpp"
#include "swarm/topology.hpp"

namespace swarm {

struct StopCriteria {
  double eps_abs = 1e-3;
  double eps_rel = 6e-2;
  int max_iter = 300;
};

/// Initial values for the five penalty families.
struct PenaltyInit {
  double tau = 0.2;    // control consensus
  double rho = 2.0;    // state consensus
  double mu = 1.0;     // neighbor-stack consensus
  double sigma = 2.0;  // time consensus
  double gamma = 1.0;  // time-stack consensus
};

struct AgentSpec {
  AgentState initial;
  AgentState target;
};

struct Obstacle {
  Eigen::Vector2d center;
  double radius;
};

enum class TimeSequenceKind { kNone, kSimultaneous, kIntervals };

/// Arrival-order requirement: none, simultaneous (all equal), or a
/// consecutive chain by agent id with a fixed interval and relaxation.
struct TimeSequenceConfig {
  TimeSequenceKind kind = TimeSequenceKind::kNone;
  double interval = 0.0;  // seconds between consecutive agents
  double relax = 0.0;     // elementwise slack; 0 enforces equalities
};

struct ScenarioConfig {
  std::string name;
  std::vector<AgentSpec> agents;
  DynamicsParams dynamics;
  double t_guess = 9.0;
  double t_min = 0.1;
  double t_max = 20.0;
  std::vector<Obstacle> obstacles;
  double d_obstacle_safe = 10.0;
  double d_collision = 10.0;
  double d_comm = 300.0;
  int topology_size = 0;  // <= 0 selects the complete topology
  TimeSequenceConfig time_sequence;
  Eigen::Vector3d w_terminal = Eigen::Vector3d::Constant(25.0);
  double r_control = 1.0;
  Eigen::Vector3d w_state = Eigen::Vector3d::Zero();
  StopCriteria stop;
  PenaltyInit penalties;

  CostWeights weights_for(int agent) const;
  Topology topology() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True-constraint audit of a finished run: distances and gaps come from
/// the nonlinear constraints, never the linearizations a solver used.
struct ValidationReport {
  double min_pairwise_distance = 0.0;
  int min_pairwise_instant = -1;
  std::pair<int, int> min_pairwise_pair{-1, -1};
  double min_obstacle_clearance = 0.0;  // min over (dist to center - r_o - d_o)
  double max_neighbor_distance = 0.0;   // over neighbor pairs, all instants
  std::vector<double> terminal_position_errors;
  std::vector<double> time_gaps;  // t_j - t_i per sequence row
  bool collision_ok = true;
  bool obstacle_ok = true;
  bool comm_ok = true;
  bool time_sequence_ok = true;
  bool converged = false;
  int iterations = 0;

  bool all_ok() const { return collision_ok && obstacle_ok && comm_ok && time_sequence_ok; }
};

namespace scenarios {

/// The four built-in benchmark scenarios (1..4).
ScenarioConfig builtin(int id);

/// Parses a versioned config file (units in key names, degrees for
/// headings). Unknown keys are rejected; errors name the offending field.
ScenarioConfig load(const std::string& path);
ScenarioConfig from_json_text(const std::string& text);
std::string to_json_text(const ScenarioConfig& config);

/// Per-agent arrival-order rows over the agent's neighbor stack, or
/// nullopt when the scenario imposes none (or the agent has no paired
/// neighbor).
std::optional<qp::TimeSequenceSpec> time_spec_for(const ScenarioConfig& config,
                                                  const Topology& topo, int agent);

/// Sweeps the true nonlinear constraints over every instant.
ValidationReport validate(const std::vector<AgentTrajectory>& trajectories,
                          const ScenarioConfig& config);

}  // namespace scenarios
}  // namespace swarm
