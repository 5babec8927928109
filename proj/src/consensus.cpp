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

#include "swarm/consensus.hpp"

#include <chrono>
#include <cmath>

#include "swarm/parallel.hpp"
#include "swarm/penalty.hpp"

namespace swarm {

Engine::Engine(ScenarioConfig scenario) : Engine(std::move(scenario), Options()) {}

Engine::Engine(ScenarioConfig scenario, Options options)
    : scenario_(std::move(scenario)),
      options_(options),
      topo_(scenario_.topology()),
      bus_(topo_) {
  bus_.set_trace(options_.bus_trace);
  const int m = topo_.m;
  weights_.reserve(m);
  time_specs_.reserve(m);
  for (int i = 0; i < m; ++i) {
    weights_.push_back(scenario_.weights_for(i));
    time_specs_.push_back(scenarios::time_spec_for(scenario_, topo_, i));
  }
}

void Engine::init_agent_containers(ConsensusState& state) {
  const int n = scenario_.dynamics.n_steps;
  state.agents.resize(topo_.m);
  for (int i = 0; i < topo_.m; ++i) {
    AgentVars& v = state.agents[i];
    const size_t blocks = topo_.neighbor_sets[i].size();
    v.u_tilde.assign(n, 0.0);
    v.x_copy.assign(blocks, std::vector<AgentState>(n + 1, AgentState::Zero()));
    v.t_copy.assign(blocks, 0.0);
    v.z_cache = v.x_copy;
    v.s_cache = v.t_copy;
    v.zeta.assign(n, 0.0);
    v.lambda.assign(n + 1, Eigen::Vector3d::Zero());
    v.nu = 0.0;
    v.y.assign(blocks, std::vector<Eigen::Vector3d>(n + 1, Eigen::Vector3d::Zero()));
    v.eta.assign(blocks, 0.0);
    v.tau = scenario_.penalties.tau;
    v.rho = scenario_.penalties.rho;
    v.mu = scenario_.penalties.mu;
    v.sigma = scenario_.penalties.sigma;
    v.gamma = scenario_.penalties.gamma;
  }
}

ConsensusState Engine::warm_start() {
  const int m = topo_.m;
  const int n = scenario_.dynamics.n_steps;
  const int workers = worker_count(options_.threads);

  ConsensusState state;
  init_agent_containers(state);

  std::vector<bool> ok(m, false);
  parallel_for(m, workers, [&](int i) {
    AgentTrajectory init = model::rollout(scenario_.agents[i].initial,
                                          std::vector<Control>(n, 0.0), scenario_.t_guess,
                                          scenario_.dynamics);
    pddp::SolveOptions opts;
    opts.epsilon = 1e-6;
    opts.max_inner = 100;
    opts.alpha = options_.step1_alpha;
    opts.freeze_theta = true;
    opts.line_search = options_.step1_line_search;
    opts.bounds = {scenario_.dynamics.omega_max, scenario_.t_min, scenario_.t_max};
    pddp::SolveResult r = pddp::solve_local(scenario_.agents[i].initial, init, weights_[i],
                                            nullptr, scenario_.dynamics, opts);
    state.agents[i].local = std::move(r.traj);
    ok[i] = r.converged;
  });
  for (int i = 0; i < m; ++i) {
    if (!ok[i]) {
      throw EngineError("warm start: plain DDP failed to converge for agent " +
                        std::to_string(i));
    }
  }

  // Copies start at the locals; stacks at the exchanged neighbor locals.
  std::vector<GlobalMessage> outgoing(m);
  for (int i = 0; i < m; ++i) {
    outgoing[i] = {i, state.agents[i].local.states, state.agents[i].local.t_final};
  }
  const auto inbox = bus_.exchange_globals(next_round_++, outgoing);
  for (int i = 0; i < m; ++i) {
    AgentVars& v = state.agents[i];
    v.u_tilde = v.local.controls;
    for (const GlobalMessage& msg : inbox[i]) {
      const int b = topo_.block_of(i, msg.about);
      v.x_copy[b] = msg.z;
      v.t_copy[b] = msg.s;
    }
    v.z_cache = v.x_copy;
    v.s_cache = v.t_copy;
  }
  state.iteration = 0;
  return state;
}

void Engine::step1_all(ConsensusState& state) {
  const int workers = worker_count(options_.threads);
  parallel_for(topo_.m, workers, [&](int i) {
    AgentVars& v = state.agents[i];
    AugmentedTerms aug;
    aug.x_tilde = v.x_copy[0];
    aug.u_tilde = v.u_tilde;
    aug.t_tilde = v.t_copy[0];
    aug.lambda = v.lambda;
    aug.zeta = v.zeta;
    aug.nu = v.nu;
    aug.rho = v.rho;
    aug.tau = v.tau;
    aug.sigma = v.sigma;

    pddp::SolveOptions opts;
    opts.epsilon = 1e-4;
    opts.max_inner = options_.step1_max_inner;
    opts.alpha = options_.step1_alpha;
    opts.freeze_theta = false;
    opts.line_search = options_.step1_line_search;
    opts.bounds = {scenario_.dynamics.omega_max, scenario_.t_min, scenario_.t_max};

    pddp::SolveResult r = pddp::solve_local(scenario_.agents[i].initial, v.local, weights_[i],
                                            &aug, scenario_.dynamics, opts);
    v.local = std::move(r.traj);
    v.step1_converged = r.converged;
  });
}

void Engine::step2_all(ConsensusState& state) {
  const int n = scenario_.dynamics.n_steps;
  const int workers = worker_count(options_.threads);
  const double activation = 2.0 * scenario_.d_obstacle_safe;

  parallel_for(topo_.m, workers, [&](int i) {
    AgentVars& v = state.agents[i];
    const size_t blocks = topo_.neighbor_sets[i].size();
    bool feasible = true;

    // Control copies: exact box projection of u + zeta/tau.
    for (int k = 0; k < n; ++k) {
      v.u_tilde[k] = qp::project_box(v.local.controls[k] + v.zeta[k] / v.tau,
                                     -scenario_.dynamics.omega_max, scenario_.dynamics.omega_max);
    }

    // Per-instant state stacks, constraints linearized about the current
    // copies and generated only near activity.
    std::vector<std::vector<AgentState>> next(blocks, std::vector<AgentState>(n + 1));
    for (int k = 0; k <= n; ++k) {
      std::vector<qp::StackConstraint> constraints;
      const Eigen::Vector2d p0 = v.x_copy[0][k].head<2>();
      for (const Obstacle& o : scenario_.obstacles) {
        const double keep = o.radius + scenario_.d_obstacle_safe;
        Eigen::Vector2d nominal = p0;
        if ((nominal - o.center).norm() < 1e-9) nominal.x() += 1e-6;  // degenerate nominal
        if ((nominal - o.center).norm() <= keep + activation) {
          const qp::HalfPlane hp = qp::linearize_keepout(nominal, o.center, keep);
          constraints.push_back({0, -1, hp.normal, hp.offset});
        }
      }
      for (size_t b = 1; b < blocks; ++b) {
        const Eigen::Vector2d pb = v.x_copy[b][k].head<2>();
        Eigen::Vector2d rel = p0 - pb;
        if (rel.norm() < 1e-9) rel.x() += 1e-6;
        const double dist = rel.norm();
        const Eigen::Vector2d dir = rel / dist;
        if (dist <= scenario_.d_collision + activation) {
          constraints.push_back({0, static_cast<int>(b), dir, scenario_.d_collision});
        }
        if (dist >= scenario_.d_comm - activation) {
          constraints.push_back({0, static_cast<int>(b), -dir, -scenario_.d_comm});
        }
      }

      const Eigen::Vector3d own_anchor = v.local.states[k] + v.lambda[k] / v.rho;
      Eigen::VectorXd stack_anchor(3 * blocks);
      for (size_t b = 0; b < blocks; ++b) {
        stack_anchor.segment<3>(3 * b) = v.z_cache[b][k] - v.y[b][k] / v.mu;
      }
      const qp::SafeResult r = qp::solve_state_safe(own_anchor, v.rho, stack_anchor, v.mu,
                                                    constraints);
      feasible = feasible && r.feasible;
      for (size_t b = 0; b < blocks; ++b) next[b][k] = r.stack.segment<3>(3 * b);
    }
    v.x_copy = std::move(next);

    // Safe time stack.
    Eigen::VectorXd time_anchor(blocks);
    for (size_t b = 0; b < blocks; ++b) time_anchor[b] = v.s_cache[b] - v.eta[b] / v.gamma;
    const qp::TimeSequenceSpec* seq =
        time_specs_[i].has_value() ? &time_specs_[i].value() : nullptr;
    const qp::SafeResult tr = qp::solve_time_safe(v.local.t_final + v.nu / v.sigma, v.sigma,
                                                  time_anchor, v.gamma, seq, scenario_.t_min,
                                                  scenario_.t_max);
    feasible = feasible && tr.feasible;
    for (size_t b = 0; b < blocks; ++b) v.t_copy[b] = tr.stack[b];

    v.qp_feasible = feasible;
  });
}

void Engine::step3_global(ConsensusState& state) {
  const int m = topo_.m;

  std::vector<std::vector<CopyMessage>> outgoing(m);
  for (int i = 0; i < m; ++i) {
    const AgentVars& v = state.agents[i];
    const auto& set = topo_.neighbor_sets[i];
    outgoing[i].reserve(set.size());
    for (size_t b = 0; b < set.size(); ++b) {
      outgoing[i].push_back({set[b], i, v.x_copy[b], v.t_copy[b], v.y[b], v.eta[b], v.mu,
                             v.gamma});
    }
  }
  const auto copy_inbox = bus_.exchange_copies(next_round_++, outgoing);

  // Deemed-neighbor average: every view of agent i, dual-shifted by the
  // sender's own penalty.
  std::vector<GlobalMessage> globals(m);
  const int n = scenario_.dynamics.n_steps;
  for (int i = 0; i < m; ++i) {
    const auto& box = copy_inbox[i];
    std::vector<AgentState> z(n + 1, AgentState::Zero());
    double s = 0.0;
    for (const CopyMessage& msg : box) {
      for (int k = 0; k <= n; ++k) z[k] += msg.state_copy[k] + msg.dual_y[k] / msg.mu;
      s += msg.time_copy + msg.dual_eta / msg.gamma;
    }
    const double inv = 1.0 / static_cast<double>(box.size());
    for (int k = 0; k <= n; ++k) z[k] *= inv;
    globals[i] = {i, std::move(z), s * inv};
  }

  const auto global_inbox = bus_.exchange_globals(next_round_++, globals);
  for (int i = 0; i < m; ++i) {
    AgentVars& v = state.agents[i];
    for (const GlobalMessage& msg : global_inbox[i]) {
      const int b = topo_.block_of(i, msg.about);
      v.z_cache[b] = msg.z;
      v.s_cache[b] = msg.s;
    }
  }
}

void Engine::dual_update_all(ConsensusState& state) {
  const int n = scenario_.dynamics.n_steps;
  const int workers = worker_count(options_.threads);
  parallel_for(topo_.m, workers, [&](int i) {
    AgentVars& v = state.agents[i];
    for (int k = 0; k < n; ++k) v.zeta[k] += v.tau * (v.local.controls[k] - v.u_tilde[k]);
    for (int k = 0; k <= n; ++k) v.lambda[k] += v.rho * (v.local.states[k] - v.x_copy[0][k]);
    v.nu += v.sigma * (v.local.t_final - v.t_copy[0]);
    for (size_t b = 0; b < v.x_copy.size(); ++b) {
      for (int k = 0; k <= n; ++k) v.y[b][k] += v.mu * (v.x_copy[b][k] - v.z_cache[b][k]);
      v.eta[b] += v.gamma * (v.t_copy[b] - v.s_cache[b]);
    }
  });
}

ResidualReport Engine::residuals(const ConsensusState& state, const ConsensusState& prev,
                                 IterateNorms* norms_out) const {
  const int n = scenario_.dynamics.n_steps;
  ResidualReport report;
  IterateNorms norms;

  std::array<double, kFamilyCount> p2{}, d2{}, s2{}, dim{}, lhs2{}, rhs2{};

  for (int i = 0; i < topo_.m; ++i) {
    const AgentVars& v = state.agents[i];
    const AgentVars& w = prev.agents[i];
    // Residual scaling uses the penalties that drove this iteration.
    const double tau = w.tau, rho = w.rho, mu = w.mu, sigma = w.sigma, gamma = w.gamma;

    for (int k = 0; k < n; ++k) {
      const double rp = v.local.controls[k] - v.u_tilde[k];
      const double rd = tau * (v.u_tilde[k] - w.u_tilde[k]);
      p2[kFamU] += rp * rp;
      d2[kFamU] += rd * rd;
      s2[kFamU] += v.zeta[k] * v.zeta[k];
      lhs2[kFamU] += v.local.controls[k] * v.local.controls[k];
      rhs2[kFamU] += v.u_tilde[k] * v.u_tilde[k];
    }
    dim[kFamU] += n;

    for (int k = 0; k <= n; ++k) {
      p2[kFamX] += (v.local.states[k] - v.x_copy[0][k]).squaredNorm();
      d2[kFamX] += rho * rho * (v.x_copy[0][k] - w.x_copy[0][k]).squaredNorm();
      s2[kFamX] += v.lambda[k].squaredNorm();
      lhs2[kFamX] += v.local.states[k].squaredNorm();
      rhs2[kFamX] += v.x_copy[0][k].squaredNorm();
    }
    dim[kFamX] += 3.0 * (n + 1);

    for (size_t b = 0; b < v.x_copy.size(); ++b) {
      for (int k = 0; k <= n; ++k) {
        p2[kFamXa] += (v.x_copy[b][k] - v.z_cache[b][k]).squaredNorm();
        d2[kFamXa] += mu * mu * (v.z_cache[b][k] - w.z_cache[b][k]).squaredNorm();
        s2[kFamXa] += v.y[b][k].squaredNorm();
        lhs2[kFamXa] += v.x_copy[b][k].squaredNorm();
        rhs2[kFamXa] += v.z_cache[b][k].squaredNorm();
      }
      const double rp = v.t_copy[b] - v.s_cache[b];
      const double rd = gamma * (v.s_cache[b] - w.s_cache[b]);
      p2[kFamTa] += rp * rp;
      d2[kFamTa] += rd * rd;
      s2[kFamTa] += v.eta[b] * v.eta[b];
      lhs2[kFamTa] += v.t_copy[b] * v.t_copy[b];
      rhs2[kFamTa] += v.s_cache[b] * v.s_cache[b];
    }
    dim[kFamXa] += 3.0 * (n + 1) * v.x_copy.size();
    dim[kFamTa] += v.x_copy.size();

    {
      const double rp = v.local.t_final - v.t_copy[0];
      const double rd = sigma * (v.t_copy[0] - w.t_copy[0]);
      p2[kFamT] += rp * rp;
      d2[kFamT] += rd * rd;
      s2[kFamT] += v.nu * v.nu;
      lhs2[kFamT] += v.local.t_final * v.local.t_final;
      rhs2[kFamT] += v.t_copy[0] * v.t_copy[0];
      dim[kFamT] += 1.0;
    }
  }

  for (int f = 0; f < kFamilyCount; ++f) {
    report.fam[f].primal = std::sqrt(p2[f]);
    report.fam[f].dual = std::sqrt(d2[f]);
    report.fam[f].dual_stack = std::sqrt(s2[f]);
    report.fam[f].dim = dim[f];
    norms.lhs[f] = std::sqrt(lhs2[f]);
    norms.rhs[f] = std::sqrt(rhs2[f]);
  }
  if (norms_out != nullptr) *norms_out = norms;
  return report;
}

bool Engine::check_stop(const ResidualReport& report, const StopCriteria& criteria,
                        const IterateNorms& norms) {
  for (int f = 0; f < kFamilyCount; ++f) {
    const FamilyStats& fam = report.fam[f];
    const double scale = std::sqrt(fam.dim) * criteria.eps_abs;
    const double primal_bound =
        scale + criteria.eps_rel * std::max(norms.lhs[f], norms.rhs[f]);
    const double dual_bound = scale + criteria.eps_rel * fam.dual_stack;
    if (fam.primal > primal_bound || fam.dual > dual_bound) return false;
  }
  return true;
}

SwarmSolution Engine::run(PenaltyScheme& scheme) {
  const auto t0 = std::chrono::steady_clock::now();

  ConsensusState state = warm_start();
  scheme.start(state);

  SwarmSolution solution;
  solution.scheme = scheme.name();

  std::optional<ResidualReport> last_report;
  for (int iter = 1; iter <= scenario_.stop.max_iter; ++iter) {
    const ConsensusState prev = state;
    state.iteration = iter;

    step1_all(state);
    step2_all(state);
    step3_global(state);
    dual_update_all(state);
    scheme.update_penalties(state, prev, iter, last_report ? &*last_report : nullptr);

    IterateNorms norms;
    const ResidualReport report = residuals(state, prev, &norms);
    const bool stop = check_stop(report, scenario_.stop, norms);
    const bool restarted = scheme.post_residuals(state, prev, iter, report);

    IterationTraceRow row;
    row.iteration = iter;
    row.t_finals.reserve(topo_.m);
    row.penalties.reserve(topo_.m);
    for (const AgentVars& v : state.agents) {
      row.t_finals.push_back(v.local.t_final);
      row.penalties.push_back({v.tau, v.rho, v.mu, v.sigma, v.gamma});
    }
    row.report = report;
    row.stopped = stop;
    row.na_restart = restarted;
    solution.trace.push_back(std::move(row));

    last_report = report;
    solution.iterations = iter;
    if (stop) {
      solution.converged = true;
      break;
    }
  }

  solution.trajectories.reserve(topo_.m);
  for (const AgentVars& v : state.agents) solution.trajectories.push_back(v.local);
  solution.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return solution;
}

}  // namespace swarm
