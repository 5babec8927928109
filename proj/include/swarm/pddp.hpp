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
#include <vector>

#include "swarm/cost.hpp"
#include "swarm/model.hpp"

namespace swarm::pddp {

/// Quadratic value-function expansion in (state, final-time parameter).
struct ValueExpansion {
  double v = 0.0;
  Eigen::Vector3d v_x = Eigen::Vector3d::Zero();
  double v_theta = 0.0;
  Eigen::Matrix3d v_xx = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v_xtheta = Eigen::Vector3d::Zero();
  double v_thetatheta = 0.0;
};

/// Action-value expansion blocks at one step.
struct QExpansion {
  Eigen::Vector3d q_x;
  double q_u;
  double q_theta;
  Eigen::Matrix3d q_xx;
  double q_uu;
  double q_thetatheta;
  Eigen::Vector3d q_xu;
  Eigen::Vector3d q_xtheta;
  double q_utheta;
};

/// Backward-pass output: per-step feedforward/feedback/parameter-coupling
/// gains plus the Newton step on the final time.
struct GainSchedule {
  std::vector<double> k_ff;                // N
  std::vector<Eigen::RowVector3d> k_fb;    // N
  std::vector<double> m_theta;             // N
  double delta_theta_star = 0.0;
  double alpha = 1.0;  // damping applied to feedforward terms
};

struct ControlTimeBounds {
  double omega_max = 0.5768;
  double t_min = 0.1;
  double t_max = 20.0;
};

struct SolveOptions {
  double epsilon = 1e-4;   // relative: stop when |dJ| < epsilon*(1+|J|)
  int max_inner = 10;
  double alpha = 0.4;
  bool freeze_theta = false;
  bool line_search = false;  // optional backtracking on alpha, floor 1e-3
  ControlTimeBounds bounds;
};

struct SolveResult {
  AgentTrajectory traj;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int step_index)
      : std::runtime_error(what), step_index(step_index) {}
  int step_index;
};

/// Riccati-style backward sweep. Initializes the terminal expansion from
/// the (augmented) terminal cost, recurses the Q blocks with analytic
/// dynamics Jacobians, and solves the control and parameter Newton systems.
/// `reg` is a Levenberg term added to q_uu and to v_thetatheta before
/// inversion. Throws SolverFailure when either stays non-positive.
GainSchedule backward_pass(const AgentTrajectory& traj, const CostWeights& weights,
                           const AugmentedTerms* aug, const DynamicsParams& params,
                           double reg, bool freeze_theta = false, double alpha = 1.0);

/// Rolls the gains forward: t_final moves by the damped parameter step and
/// clamps to its box; each control moves by the damped feedforward plus
/// feedback on the new state deviation, clamped elementwise to omega_max.
AgentTrajectory forward_pass(const AgentTrajectory& traj, const GainSchedule& gains,
                             const DynamicsParams& params, const ControlTimeBounds& bounds);

/// Full local solve: alternate backward/forward passes until the cost
/// change falls below the relative tolerance or max_inner is reached.
/// A rejected forward pass (cost increase) engages the regularization
/// ladder instead of being accepted. Never throws on non-convergence;
/// the flag reports it.
SolveResult solve_local(const AgentState& x0, const AgentTrajectory& init_traj,
                        const CostWeights& weights, const AugmentedTerms* aug,
                        const DynamicsParams& params, const SolveOptions& opts);

}  // namespace swarm::pddp
