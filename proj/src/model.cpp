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

#include "swarm/model.hpp"

#include <cmath>

namespace swarm::model {

namespace {

inline Eigen::Vector3d velocity(const AgentState& x, Control omega, double speed) {
  return {speed * std::cos(x[kStateHeading]), speed * std::sin(x[kStateHeading]), omega};
}

// d velocity / d state (only the heading column is nonzero).
inline Eigen::Matrix3d velocity_jac(const AgentState& x, double speed) {
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j(0, kStateHeading) = -speed * std::sin(x[kStateHeading]);
  j(1, kStateHeading) = speed * std::cos(x[kStateHeading]);
  return j;
}

inline void check_finite(const AgentState& state, Control omega, double t_final) {
  if (!state.allFinite() || !std::isfinite(omega) || !std::isfinite(t_final)) {
    throw NumericDomainError("model::step: non-finite input");
  }
}

}  // namespace

AgentState step(const AgentState& state, Control omega, double t_final,
                const DynamicsParams& params) {
  check_finite(state, omega, t_final);
  const double h = 1.0 / params.n_steps;  // normalized step
  if (params.integrator == Integrator::kEuler) {
    return state + (t_final * h) * velocity(state, omega, params.speed);
  }
  // RK4 on x' = t_final * f(x, u) over one normalized step.
  const Eigen::Vector3d k1 = t_final * velocity(state, omega, params.speed);
  const Eigen::Vector3d k2 = t_final * velocity(state + 0.5 * h * k1, omega, params.speed);
  const Eigen::Vector3d k3 = t_final * velocity(state + 0.5 * h * k2, omega, params.speed);
  const Eigen::Vector3d k4 = t_final * velocity(state + h * k3, omega, params.speed);
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

StepJacobians jacobians(const AgentState& state, Control omega, double t_final,
                        const DynamicsParams& params) {
  check_finite(state, omega, t_final);
  const double h = 1.0 / params.n_steps;
  const Eigen::Vector3d du(0.0, 0.0, 1.0);  // d f / d omega

  if (params.integrator == Integrator::kEuler) {
    StepJacobians out;
    out.fx = Eigen::Matrix3d::Identity() + (t_final * h) * velocity_jac(state, params.speed);
    out.fu = (t_final * h) * du;
    out.ftheta = h * velocity(state, omega, params.speed);
    return out;
  }

  // Stage-wise chain rule through RK4. Each stage ki = t_final * f(xi, u)
  // with xi = state + h*ci*k_{i-1}; derivatives follow the same recursion.
  struct Stage {
    Eigen::Vector3d k;
    Eigen::Matrix3d dk_dx;
    Eigen::Vector3d dk_du;
    Eigen::Vector3d dk_dth;
  };
  auto eval = [&](const Stage* prev, double c) {
    Stage s;
    Eigen::Vector3d xi = state;
    Eigen::Matrix3d dxi_dx = Eigen::Matrix3d::Identity();
    Eigen::Vector3d dxi_du = Eigen::Vector3d::Zero();
    Eigen::Vector3d dxi_dth = Eigen::Vector3d::Zero();
    if (prev != nullptr) {
      xi += h * c * prev->k;
      dxi_dx += h * c * prev->dk_dx;
      dxi_du += h * c * prev->dk_du;
      dxi_dth += h * c * prev->dk_dth;
    }
    const Eigen::Vector3d f = velocity(xi, omega, params.speed);
    const Eigen::Matrix3d jf = velocity_jac(xi, params.speed);
    s.k = t_final * f;
    s.dk_dx = t_final * jf * dxi_dx;
    s.dk_du = t_final * (jf * dxi_du + du);
    s.dk_dth = f + t_final * jf * dxi_dth;
    return s;
  };

  const Stage s1 = eval(nullptr, 0.0);
  const Stage s2 = eval(&s1, 0.5);
  const Stage s3 = eval(&s2, 0.5);
  const Stage s4 = eval(&s3, 1.0);

  StepJacobians out;
  out.fx = Eigen::Matrix3d::Identity() +
           (h / 6.0) * (s1.dk_dx + 2.0 * s2.dk_dx + 2.0 * s3.dk_dx + s4.dk_dx);
  out.fu = (h / 6.0) * (s1.dk_du + 2.0 * s2.dk_du + 2.0 * s3.dk_du + s4.dk_du);
  out.ftheta = (h / 6.0) * (s1.dk_dth + 2.0 * s2.dk_dth + 2.0 * s3.dk_dth + s4.dk_dth);
  return out;
}

AgentTrajectory rollout(const AgentState& x0, const std::vector<Control>& controls,
                        double t_final, const DynamicsParams& params) {
  if (static_cast<int>(controls.size()) != params.n_steps) {
    throw std::invalid_argument("model::rollout: controls length must equal n_steps");
  }
  AgentTrajectory traj;
  traj.t_final = t_final;
  traj.controls = controls;
  traj.states.resize(params.n_steps + 1);
  traj.states[0] = x0;
  for (int k = 0; k < params.n_steps; ++k) {
    traj.states[k + 1] = step(traj.states[k], controls[k], t_final, params);
  }
  return traj;
}

}  // namespace swarm::model
