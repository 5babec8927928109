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

#include <string>

#include "swarm/consensus.hpp"
#include "swarm/scenario.hpp"

namespace swarm::artifacts {

/// Versioned solution document. Timings are deliberately excluded so the
/// file is bit-identical across reruns of the same configuration.
std::string solution_to_json(const SwarmSolution& solution, const ScenarioConfig& scenario,
                             uint64_t seed);
void write_solution_json(const std::string& path, const SwarmSolution& solution,
                         const ScenarioConfig& scenario, uint64_t seed);

/// Reads trajectories (plus converged/iterations) back from a solution
/// document. Throws ConfigError on schema problems.
struct LoadedSolution {
  std::vector<AgentTrajectory> trajectories;
  bool converged = false;
  int iterations = 0;
  std::string scheme;
  std::string scenario_name;
};
LoadedSolution read_solution_json(const std::string& path);

/// Per-agent CSV: k, t_s, x_m, y_m, heading_rad, omega_radps.
void write_agent_csvs(const std::string& dir, const SwarmSolution& solution,
                      const ScenarioConfig& scenario);

/// Per-iteration residual norms, penalties, and final times.
void write_residual_csv(const std::string& path, const SwarmSolution& solution);

/// Static plots: planar trajectories with obstacle annuli and comm-range
/// circles, and final-time convergence over iterations.
void write_trajectory_svg(const std::string& path, const SwarmSolution& solution,
                          const ScenarioConfig& scenario);
void write_time_convergence_svg(const std::string& path, const SwarmSolution& solution,
                                const ScenarioConfig& scenario);

}  // namespace swarm::artifacts
