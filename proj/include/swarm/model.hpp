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
#include <stdexcept>
#include <vector>

namespace swarm {

/// Planar constant-speed vehicle state: [x (east, m), y (north, m),
/// heading (rad)]. Headings stay unwrapped along a trajectory; no modular
/// reduction is applied mid-rollout.
using AgentState = Eigen::Vector3d;

inline constexpr int kStateX = 0;
inline constexpr int kStateY = 1;
inline constexpr int kStateHeading = 2;

/// Single control channel: turn rate omega in rad/s.
using Control = double;

enum class Integrator { kEuler, kRk4 };

struct DynamicsParams {
  double speed = 30.0;       // constant forward speed V, m/s
  double omega_max = 0.5768; // |omega| bound, rad/s
  int n_steps = 100;         // N discretization steps over [0, t_final]
  Integrator integrator = Integrator::kEuler;
};

/// One agent's discrete trajectory over N+1 instants plus its free final
/// time. states[k+1] == step(states[k], controls[k], t_final) exactly.
struct AgentTrajectory {
  std::vector<AgentState> states;  // N+1
  std::vector<Control> controls;   // N
  double t_final = 0.0;            // seconds, the optimized parameter
};

struct StepJacobians {
  Eigen::Matrix3d fx;      // d next / d state
  Eigen::Vector3d fu;      // d next / d omega
  Eigen::Vector3d ftheta;  // d next / d t_final
};

class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace model {

/// Advances the time-normalized dynamics x' = t_final * f(x, u) by one
/// normalized step of length 1/N. Euler form:
///   next = state + (t_final/N) * [V cos(h), V sin(h), omega].
/// Throws NumericDomainError on non-finite input.
AgentState step(const AgentState& state, Control omega, double t_final,
                const DynamicsParams& params);

/// Analytic partials of the step map, consistent with params.integrator.
StepJacobians jacobians(const AgentState& state, Control omega, double t_final,
                        const DynamicsParams& params);

/// Forward-simulates controls (length N) from x0.
AgentTrajectory rollout(const AgentState& x0, const std::vector<Control>& controls,
                        double t_final, const DynamicsParams& params);

}  // namespace model
}  // namespace swarm
