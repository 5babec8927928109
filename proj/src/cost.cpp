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

#include "swarm/cost.hpp"

namespace swarm::cost {

namespace {

void check_lengths(const AgentTrajectory& traj, const DynamicsParams& params,
                   const AugmentedTerms* aug) {
  const size_t n = static_cast<size_t>(params.n_steps);
  if (traj.states.size() != n + 1 || traj.controls.size() != n) {
    throw std::invalid_argument("cost: trajectory length mismatch");
  }
  if (aug != nullptr) {
    if (aug->x_tilde.size() != n + 1 || aug->lambda.size() != n + 1 ||
        aug->u_tilde.size() != n || aug->zeta.size() != n) {
      throw std::invalid_argument("cost: augmented-terms length mismatch");
    }
  }
}

inline double quad(const Eigen::Vector3d& w, const Eigen::Vector3d& e) {
  return 0.5 * e.dot(w.asDiagonal() * e);
}

}  // namespace

double local_cost(const AgentTrajectory& traj, const CostWeights& weights,
                  const DynamicsParams& params, const AugmentedTerms* aug) {
  check_lengths(traj, params, aug);
  const int n = params.n_steps;
  const double dt = traj.t_final / n;

  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d ex = traj.states[k] - weights.target;
    const double u = traj.controls[k];
    total += dt * (0.5 * weights.r_control * u * u + quad(weights.w_state, ex));
    if (aug != nullptr) {
      const Eigen::Vector3d gx = traj.states[k] - aug->x_tilde[k] + aug->lambda[k] / aug->rho;
      const double gu = u - aug->u_tilde[k] + aug->zeta[k] / aug->tau;
      total += 0.5 * aug->rho * gx.squaredNorm() + 0.5 * aug->tau * gu * gu;
    }
  }
  const Eigen::Vector3d en = traj.states[n] - weights.target;
  total += quad(weights.w_terminal, en);
  if (aug != nullptr) {
    const Eigen::Vector3d gx = traj.states[n] - aug->x_tilde[n] + aug->lambda[n] / aug->rho;
    const double gt = traj.t_final - aug->t_tilde + aug->nu / aug->sigma;
    total += 0.5 * aug->rho * gx.squaredNorm() + 0.5 * aug->sigma * gt * gt;
  }
  return total;
}

RunningDerivs running_derivs(const AgentState& x, Control u, double t_final, int k,
                             const CostWeights& weights, const DynamicsParams& params,
                             const AugmentedTerms* aug) {
  (void)k;
  const int n = params.n_steps;
  const double dt = t_final / n;
  const Eigen::Vector3d ex = x - weights.target;
  const Eigen::Vector3d ws_ex = weights.w_state.asDiagonal() * ex;
  const double l_phys = 0.5 * weights.r_control * u * u + 0.5 * ex.dot(ws_ex);

  RunningDerivs d;
  d.l = dt * l_phys;
  d.l_x = dt * ws_ex;
  d.l_u = dt * weights.r_control * u;
  d.l_theta = l_phys / n;  // d(dt)/d t_final = 1/N
  d.l_xx = dt * Eigen::Matrix3d(weights.w_state.asDiagonal());
  d.l_uu = dt * weights.r_control;
  d.l_thetatheta = 0.0;
  d.l_xu = Eigen::Vector3d::Zero();
  d.l_xtheta = ws_ex / n;
  d.l_utheta = weights.r_control * u / n;

  if (aug != nullptr) {
    const Eigen::Vector3d gx = x - aug->x_tilde[k] + aug->lambda[k] / aug->rho;
    const double gu = u - aug->u_tilde[k] + aug->zeta[k] / aug->tau;
    d.l += 0.5 * aug->rho * gx.squaredNorm() + 0.5 * aug->tau * gu * gu;
    d.l_x += aug->rho * (x - aug->x_tilde[k]) + aug->lambda[k];
    d.l_u += aug->tau * (u - aug->u_tilde[k]) + aug->zeta[k];
    d.l_xx += aug->rho * Eigen::Matrix3d::Identity();
    d.l_uu += aug->tau;
  }
  return d;
}

TerminalDerivs terminal_derivs(const AgentState& x_n, double t_final,
                               const CostWeights& weights, const AugmentedTerms* aug) {
  const Eigen::Vector3d en = x_n - weights.target;
  const Eigen::Vector3d wn_en = weights.w_terminal.asDiagonal() * en;

  TerminalDerivs d;
  d.phi = 0.5 * en.dot(wn_en);
  d.phi_x = wn_en;
  d.phi_theta = 0.0;
  d.phi_xx = weights.w_terminal.asDiagonal();
  d.phi_xtheta = Eigen::Vector3d::Zero();
  d.phi_thetatheta = 0.0;

  if (aug != nullptr) {
    const size_t n = aug->x_tilde.size() - 1;
    const Eigen::Vector3d gx = x_n - aug->x_tilde[n] + aug->lambda[n] / aug->rho;
    const double gt = t_final - aug->t_tilde + aug->nu / aug->sigma;
    d.phi += 0.5 * aug->rho * gx.squaredNorm() + 0.5 * aug->sigma * gt * gt;
    d.phi_x += aug->rho * (x_n - aug->x_tilde[n]) + aug->lambda[n];
    d.phi_theta += aug->sigma * (t_final - aug->t_tilde) + aug->nu;
    d.phi_xx += aug->rho * Eigen::Matrix3d::Identity();
    d.phi_thetatheta += aug->sigma;
  }
  return d;
}

}  // namespace swarm::cost
