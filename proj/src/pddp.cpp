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

#include "swarm/pddp.hpp"

#include <algorithm>
#include <cmath>

namespace swarm::pddp {

namespace {
constexpr double kRegMin = 1e-6;
constexpr double kRegMax = 1e6;
constexpr double kAlphaFloor = 1e-3;

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

GainSchedule backward_pass(const AgentTrajectory& traj, const CostWeights& weights,
                           const AugmentedTerms* aug, const DynamicsParams& params,
                           double reg, bool freeze_theta, double alpha) {
  const int n = params.n_steps;
  GainSchedule gains;
  gains.k_ff.resize(n);
  gains.k_fb.resize(n);
  gains.m_theta.assign(n, 0.0);
  gains.alpha = alpha;

  const cost::TerminalDerivs term = cost::terminal_derivs(traj.states[n], traj.t_final, weights, aug);
  ValueExpansion v;
  v.v = term.phi;
  v.v_x = term.phi_x;
  v.v_theta = term.phi_theta;
  v.v_xx = term.phi_xx;
  v.v_xtheta = term.phi_xtheta;
  v.v_thetatheta = term.phi_thetatheta;

  for (int k = n - 1; k >= 0; --k) {
    const cost::RunningDerivs l =
        cost::running_derivs(traj.states[k], traj.controls[k], traj.t_final, k, weights, params, aug);
    const StepJacobians f = model::jacobians(traj.states[k], traj.controls[k], traj.t_final, params);

    QExpansion q;
    q.q_x = l.l_x + f.fx.transpose() * v.v_x;
    q.q_u = l.l_u + f.fu.dot(v.v_x);
    q.q_theta = l.l_theta + v.v_theta + f.ftheta.dot(v.v_x);
    q.q_xx = l.l_xx + f.fx.transpose() * v.v_xx * f.fx;
    q.q_uu = l.l_uu + f.fu.dot(v.v_xx * f.fu);
    q.q_thetatheta = l.l_thetatheta + v.v_thetatheta + f.ftheta.dot(v.v_xx * f.ftheta) +
                     2.0 * f.ftheta.dot(v.v_xtheta);
    q.q_xu = l.l_xu + f.fx.transpose() * (v.v_xx * f.fu);
    q.q_xtheta = l.l_xtheta + f.fx.transpose() * (v.v_xx * f.ftheta) + f.fx.transpose() * v.v_xtheta;
    q.q_utheta = l.l_utheta + f.fu.dot(v.v_xx * f.ftheta) + f.fu.dot(v.v_xtheta);

    const double quu = q.q_uu + reg;
    if (!(quu > 0.0) || !std::isfinite(quu)) {
      throw SolverFailure("backward_pass: q_uu not positive definite", k);
    }
    const double quu_inv = 1.0 / quu;
    gains.k_ff[k] = -quu_inv * q.q_u;
    gains.k_fb[k] = -quu_inv * q.q_xu.transpose();
    gains.m_theta[k] = freeze_theta ? 0.0 : -quu_inv * q.q_utheta;

    // Expected decrease from the damped feedforward; bookkeeping only.
    v.v = l.l + v.v + (0.5 * alpha * alpha - alpha) * q.q_u * q.q_u * quu_inv;
    v.v_x = q.q_x - q.q_xu * (quu_inv * q.q_u);
    v.v_theta = q.q_theta - q.q_utheta * (quu_inv * q.q_u);
    v.v_xx = q.q_xx - q.q_xu * (quu_inv * q.q_xu.transpose());
    v.v_xtheta = q.q_xtheta - q.q_xu * (quu_inv * q.q_utheta);
    v.v_thetatheta = q.q_thetatheta - q.q_utheta * (quu_inv * q.q_utheta);
  }

  if (!freeze_theta) {
    // At the initial instant the state deviation vanishes, so the parameter
    // Newton step uses the fully recursed expansion.
    const double vtt = v.v_thetatheta + reg;
    if (!(vtt > 0.0) || !std::isfinite(vtt)) {
      throw SolverFailure("backward_pass: v_thetatheta not positive definite", 0);
    }
    gains.delta_theta_star = -v.v_theta / vtt;
  }
  return gains;
}

AgentTrajectory forward_pass(const AgentTrajectory& traj, const GainSchedule& gains,
                             const DynamicsParams& params, const ControlTimeBounds& bounds) {
  const int n = params.n_steps;
  AgentTrajectory out;
  out.t_final = clamp(traj.t_final + gains.alpha * gains.delta_theta_star, bounds.t_min, bounds.t_max);
  const double dtheta = out.t_final - traj.t_final;

  out.states.resize(n + 1);
  out.controls.resize(n);
  out.states[0] = traj.states[0];
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector3d dx = out.states[k] - traj.states[k];
    const double u = traj.controls[k] + gains.alpha * gains.k_ff[k] + gains.k_fb[k].dot(dx) +
                     gains.m_theta[k] * dtheta;
    out.controls[k] = clamp(u, -params.omega_max, params.omega_max);
    out.states[k + 1] = model::step(out.states[k], out.controls[k], out.t_final, params);
  }
  return out;
}

SolveResult solve_local(const AgentState& x0, const AgentTrajectory& init_traj,
                        const CostWeights& weights, const AugmentedTerms* aug,
                        const DynamicsParams& params, const SolveOptions& opts) {
  // Re-roll the initial guess so states satisfy the step recursion exactly.
  AgentTrajectory current = model::rollout(x0, init_traj.controls, init_traj.t_final, params);
  double j_current = cost::local_cost(current, weights, params, aug);

  SolveResult result;
  result.traj = current;
  result.cost = j_current;

  double reg = 0.0;
  for (int iter = 0; iter < opts.max_inner; ++iter) {
    GainSchedule gains;
    bool backward_ok = false;
    while (!backward_ok) {
      try {
        gains = backward_pass(current, weights, aug, params, reg, opts.freeze_theta, opts.alpha);
        backward_ok = true;
      } catch (const SolverFailure&) {
        if (reg >= kRegMax) {
          return result;  // ladder exhausted; best-so-far, non-converged
        }
        reg = (reg == 0.0) ? kRegMin : reg * 10.0;
      }
    }

    AgentTrajectory candidate = forward_pass(current, gains, params, opts.bounds);
    double j_candidate = cost::local_cost(candidate, weights, params, aug);

    if (opts.line_search) {
      GainSchedule damped = gains;
      while (j_candidate > j_current && damped.alpha > kAlphaFloor) {
        damped.alpha = std::max(0.5 * damped.alpha, kAlphaFloor);
        candidate = forward_pass(current, damped, params, opts.bounds);
        j_candidate = cost::local_cost(candidate, weights, params, aug);
      }
    }

    if (j_candidate > j_current) {
      // Rejected step: raise the Levenberg term and retry the sweep.
      if (reg >= kRegMax) return result;
      reg = (reg == 0.0) ? kRegMin : reg * 10.0;
      continue;
    }

    const double dj = j_current - j_candidate;
    current = std::move(candidate);
    j_current = j_candidate;
    reg = (reg <= kRegMin) ? 0.0 : reg / 10.0;

    result.traj = current;
    result.cost = j_current;
    result.iterations = iter + 1;
    if (dj < opts.epsilon * (1.0 + std::abs(j_current))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace swarm::pddp
