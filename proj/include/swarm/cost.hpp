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
#include <vector>

#include "swarm/model.hpp"

namespace swarm {

/// Quadratic tracking cost. The running integrand is integrated over
/// physical time, so each step contributes dt * l with dt = t_final/N;
/// this is what couples the final time into the objective.
struct CostWeights {
  Eigen::Vector3d w_terminal = Eigen::Vector3d::Zero();  // diag of W_N
  double r_control = 1.0;
  Eigen::Vector3d w_state = Eigen::Vector3d::Zero();     // diag of W_s
  AgentState target = AgentState::Zero();
};

/// Consensus-penalty terms added to the local objective during the
/// distributed iteration. Copies are the targets the local solve is pulled
/// toward; duals shift them; penalties scale them.
struct AugmentedTerms {
  std::vector<AgentState> x_tilde;   // N+1 state copies
  std::vector<Control> u_tilde;      // N control copies
  double t_tilde = 0.0;
  std::vector<Eigen::Vector3d> lambda;  // N+1 state duals
  std::vector<double> zeta;             // N control duals
  double nu = 0.0;                      // time dual
  double rho = 0.0;   // state penalty
  double tau = 0.0;   // control penalty
  double sigma = 0.0; // time penalty
};

namespace cost {

/// Total objective of one trajectory: running + terminal cost, plus the
/// augmented quadratic penalties when aug is non-null:
///   sum_k rho/2 |x_k - x~_k + lambda_k/rho|^2 + tau/2 |u_k - u~_k + zeta_k/tau|^2
///   + rho/2 |x_N - x~_N + lambda_N/rho|^2 + sigma/2 (t - t~ + nu/sigma)^2.
double local_cost(const AgentTrajectory& traj, const CostWeights& weights,
                  const DynamicsParams& params, const AugmentedTerms* aug = nullptr);

// Derivative bundles consumed by the backward pass. Index k < N selects the
// running term, k == N the terminal term (control entries unused there).
struct RunningDerivs {
  double l;
  Eigen::Vector3d l_x;
  double l_u;
  double l_theta;
  Eigen::Matrix3d l_xx;
  double l_uu;
  double l_thetatheta;
  Eigen::Vector3d l_xu;      // d^2 l / dx du
  Eigen::Vector3d l_xtheta;  // d^2 l / dx dtheta
  double l_utheta;
};

RunningDerivs running_derivs(const AgentState& x, Control u, double t_final, int k,
                             const CostWeights& weights, const DynamicsParams& params,
                             const AugmentedTerms* aug);

struct TerminalDerivs {
  double phi;
  Eigen::Vector3d phi_x;
  double phi_theta;
  Eigen::Matrix3d phi_xx;
  Eigen::Vector3d phi_xtheta;
  double phi_thetatheta;
};

TerminalDerivs terminal_derivs(const AgentState& x_n, double t_final,
                               const CostWeights& weights, const AugmentedTerms* aug);

}  // namespace cost
}  // namespace swarm
