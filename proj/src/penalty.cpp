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

#include "swarm/penalty.hpp"

#include <cmath>

namespace swarm {

namespace penalty {

SpectralEstimate spectral_alpha(const Eigen::VectorXd& delta_primal,
                                const Eigen::VectorXd& delta_dual_hat) {
  SpectralEstimate est;
  const double pp = delta_primal.squaredNorm();
  const double hh = delta_dual_hat.squaredNorm();
  const double ph = delta_primal.dot(delta_dual_hat);
  if (!(ph > 0.0) || pp <= 0.0 || hh <= 0.0) {
    return est;  // invalid; the safeguard rejects it
  }
  est.sd = hh / ph;
  est.mg = ph / pp;
  est.hybrid = (2.0 * est.mg > est.sd) ? est.mg : est.sd - 0.5 * est.mg;
  est.valid = est.hybrid > 0.0 && std::isfinite(est.hybrid);
  return est;
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

double ap_update(const FamilyHistory& hist, const Eigen::VectorXd& primal_now,
                 const Eigen::VectorXd& gside_now, const Eigen::VectorXd& dual_now,
                 const Eigen::VectorXd& hat_now, double current_penalty, const ApParams& params,
                 int n) {
  const Eigen::VectorXd dp = primal_now - hist.primal;
  const Eigen::VectorXd dh = hat_now - hist.hat;
  // Copy-side delta keeps the negative orientation of the conjugate
  // subgradient relation.
  const Eigen::VectorXd dg = hist.gside - gside_now;
  const Eigen::VectorXd dd = dual_now - hist.dual;

  const SpectralEstimate alpha = spectral_alpha(dp, dh);
  const SpectralEstimate beta = spectral_alpha(dg, dd);
  const bool alpha_ok = alpha.valid && correlation(dp, dh) > params.eps_cor;
  const bool beta_ok = beta.valid && correlation(dg, dd) > params.eps_cor;

  double candidate = current_penalty;
  if (alpha_ok && beta_ok) {
    candidate = std::sqrt(alpha.hybrid * beta.hybrid);
  } else if (alpha_ok) {
    candidate = alpha.hybrid;
  } else if (beta_ok) {
    candidate = beta.hybrid;
  }

  const double bound = 1.0 + params.c_cg / (static_cast<double>(n) * n);
  return std::min(std::max(candidate, current_penalty / bound), current_penalty * bound);
}

double rb_update(double primal_norm, double dual_norm, double penalty, bool inverted) {
  const bool primal_dominates = primal_norm >= 10.0 * dual_norm;
  const bool dual_dominates = dual_norm >= 10.0 * primal_norm;
  if (primal_dominates && dual_dominates) return penalty;  // both zero
  if (primal_dominates) return inverted ? 2.0 * penalty : penalty / 2.0;
  if (dual_dominates) return inverted ? penalty / 2.0 : 2.0 * penalty;
  return penalty;
}

namespace {

Eigen::VectorXd flatten_states(const std::vector<AgentState>& states) {
  Eigen::VectorXd v(3 * states.size());
  for (size_t k = 0; k < states.size(); ++k) v.segment<3>(3 * k) = states[k];
  return v;
}

Eigen::VectorXd flatten_stack(const std::vector<std::vector<AgentState>>& stack) {
  const size_t blocks = stack.size();
  const size_t per = stack.empty() ? 0 : 3 * stack[0].size();
  Eigen::VectorXd v(blocks * per);
  for (size_t b = 0; b < blocks; ++b) v.segment(b * per, per) = flatten_states(stack[b]);
  return v;
}

Eigen::VectorXd flat_primal(const AgentVars& v, Family f) {
  switch (f) {
    case kFamU:
      return Eigen::Map<const Eigen::VectorXd>(v.local.controls.data(), v.local.controls.size());
    case kFamX:
      return flatten_states(v.local.states);
    case kFamXa:
      return flatten_stack(v.x_copy);
    case kFamT:
      return Eigen::VectorXd::Constant(1, v.local.t_final);
    case kFamTa:
      return Eigen::Map<const Eigen::VectorXd>(v.t_copy.data(), v.t_copy.size());
    default:
      return {};
  }
}

Eigen::VectorXd flat_gside(const AgentVars& v, Family f) {
  switch (f) {
    case kFamU:
      return Eigen::Map<const Eigen::VectorXd>(v.u_tilde.data(), v.u_tilde.size());
    case kFamX:
      return flatten_states(v.x_copy[0]);
    case kFamXa:
      return flatten_stack(v.z_cache);
    case kFamT:
      return Eigen::VectorXd::Constant(1, v.t_copy[0]);
    case kFamTa:
      return Eigen::Map<const Eigen::VectorXd>(v.s_cache.data(), v.s_cache.size());
    default:
      return {};
  }
}

Eigen::VectorXd flat_dual(const AgentVars& v, Family f) {
  switch (f) {
    case kFamU:
      return Eigen::Map<const Eigen::VectorXd>(v.zeta.data(), v.zeta.size());
    case kFamX:
      return flatten_states(v.lambda);
    case kFamXa:
      return flatten_stack(v.y);
    case kFamT:
      return Eigen::VectorXd::Constant(1, v.nu);
    case kFamTa:
      return Eigen::Map<const Eigen::VectorXd>(v.eta.data(), v.eta.size());
    default:
      return {};
  }
}

double penalty_of(const AgentVars& v, Family f) {
  switch (f) {
    case kFamU: return v.tau;
    case kFamX: return v.rho;
    case kFamXa: return v.mu;
    case kFamT: return v.sigma;
    case kFamTa: return v.gamma;
    default: return 0.0;
  }
}

void set_penalty(AgentVars& v, Family f, double value) {
  switch (f) {
    case kFamU: v.tau = value; break;
    case kFamX: v.rho = value; break;
    case kFamXa: v.mu = value; break;
    case kFamT: v.sigma = value; break;
    case kFamTa: v.gamma = value; break;
    default: break;
  }
}

// Half-step duals: the current local/copy movement priced with the
// pre-update copy (or global) and the penalties that drove the iteration.
Eigen::VectorXd intermediate_dual(const AgentVars& now, const AgentVars& prev, Family f) {
  switch (f) {
    case kFamU:
      return flat_dual(prev, kFamU) +
             prev.tau * (flat_primal(now, kFamU) - flat_gside(prev, kFamU));
    case kFamX:
      return flat_dual(prev, kFamX) +
             prev.rho * (flat_primal(now, kFamX) - flat_gside(prev, kFamX));
    case kFamXa:
      return flat_dual(prev, kFamXa) +
             prev.mu * (flat_primal(now, kFamXa) - flat_gside(prev, kFamXa));
    case kFamT:
      return flat_dual(prev, kFamT) +
             prev.sigma * (flat_primal(now, kFamT) - flat_gside(prev, kFamT));
    case kFamTa:
      return flat_dual(prev, kFamTa) +
             prev.gamma * (flat_primal(now, kFamTa) - flat_gside(prev, kFamTa));
    default:
      return {};
  }
}

class FixedScheme final : public PenaltyScheme {
 public:
  std::string name() const override { return "fixed"; }
};

class RbScheme final : public PenaltyScheme {
 public:
  RbScheme(bool inverted, int freq) : inverted_(inverted), freq_(freq) {}
  std::string name() const override { return inverted_ ? "rb-inverted" : "rb"; }

  void update_penalties(ConsensusState& state, const ConsensusState& prev, int n,
                        const ResidualReport* last_report) override {
    (void)prev;
    if (last_report == nullptr) return;
    if (freq_ > 1 && n % freq_ != 1) return;
    for (AgentVars& v : state.agents) {
      for (int f = 0; f < kFamilyCount; ++f) {
        const FamilyStats& fam = last_report->fam[f];
        set_penalty(v, static_cast<Family>(f),
                    rb_update(fam.primal, fam.dual, penalty_of(v, static_cast<Family>(f)),
                              inverted_));
      }
    }
  }

 private:
  bool inverted_;
  int freq_;
};

class ApScheme final : public PenaltyScheme {
 public:
  explicit ApScheme(const ApParams& params) : params_(params) {}
  std::string name() const override { return "ap"; }

  void start(const ConsensusState& state) override {
    history_.clear();
    history_.resize(state.agents.size());
    for (size_t a = 0; a < state.agents.size(); ++a) {
      for (int f = 0; f < kFamilyCount; ++f) {
        FamilyHistory& h = history_[a][f];
        h.primal = flat_primal(state.agents[a], static_cast<Family>(f));
        h.gside = flat_gside(state.agents[a], static_cast<Family>(f));
        h.dual = flat_dual(state.agents[a], static_cast<Family>(f));
        h.hat = h.dual;
      }
    }
  }

  void update_penalties(ConsensusState& state, const ConsensusState& prev, int n,
                        const ResidualReport* last_report) override {
    (void)last_report;
    if (params_.freq > 1 && n % params_.freq != 1) return;
    for (size_t a = 0; a < state.agents.size(); ++a) {
      AgentVars& v = state.agents[a];
      for (int f = 0; f < kFamilyCount; ++f) {
        const Family fam = static_cast<Family>(f);
        const Eigen::VectorXd primal_now = flat_primal(v, fam);
        const Eigen::VectorXd gside_now = flat_gside(v, fam);
        const Eigen::VectorXd dual_now = flat_dual(v, fam);
        const Eigen::VectorXd hat_now = intermediate_dual(v, prev.agents[a], fam);

        FamilyHistory& h = history_[a][f];
        set_penalty(v, fam,
                    ap_update(h, primal_now, gside_now, dual_now, hat_now, penalty_of(v, fam),
                              params_, n));
        h.primal = primal_now;
        h.gside = gside_now;
        h.dual = dual_now;
        h.hat = hat_now;
      }
    }
  }

 private:
  ApParams params_;
  std::vector<std::array<FamilyHistory, kFamilyCount>> history_;
};

// Restart-based accelerated consensus: copies and duals get a momentum
// term whenever the combined residual keeps decaying fast enough.
class NaScheme final : public PenaltyScheme {
 public:
  explicit NaScheme(double eta) : eta_(eta) {}
  std::string name() const override { return "na"; }

  bool post_residuals(ConsensusState& state, const ConsensusState& prev, int n,
                      const ResidualReport& report) override {
    (void)prev;
    (void)n;
    double combined = 0.0;
    for (const FamilyStats& f : report.fam) {
      combined += f.primal * f.primal + f.dual * f.dual;
    }

    if (snapshot_.empty()) {
      snapshot(state);
      alpha_ = 1.0;
      c_prev_ = combined;
      return false;
    }

    if (combined < eta_ * c_prev_) {
      const double alpha_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha_ * alpha_));
      const double w = (alpha_ - 1.0) / alpha_next;
      std::vector<Snapshot> accepted;
      take(state, accepted);
      extrapolate(state, w);
      snapshot_ = std::move(accepted);
      alpha_ = alpha_next;
      c_prev_ = combined;
      return false;
    }

    // Restart: drop the momentum, keep the raw iterate.
    snapshot(state);
    alpha_ = 1.0;
    c_prev_ = c_prev_ / eta_;
    return true;
  }

 private:
  struct Snapshot {
    std::vector<double> u_tilde;
    std::vector<std::vector<AgentState>> x_copy;
    std::vector<double> t_copy;
    std::vector<double> zeta;
    std::vector<Eigen::Vector3d> lambda;
    double nu;
    std::vector<std::vector<Eigen::Vector3d>> y;
    std::vector<double> eta;
  };

  static void take(const ConsensusState& state, std::vector<Snapshot>& out) {
    out.clear();
    out.reserve(state.agents.size());
    for (const AgentVars& v : state.agents) {
      out.push_back({v.u_tilde, v.x_copy, v.t_copy, v.zeta, v.lambda, v.nu, v.y, v.eta});
    }
  }

  void snapshot(const ConsensusState& state) { take(state, snapshot_); }

  void extrapolate(ConsensusState& state, double w) const {
    for (size_t a = 0; a < state.agents.size(); ++a) {
      AgentVars& v = state.agents[a];
      const Snapshot& s = snapshot_[a];
      for (size_t k = 0; k < v.u_tilde.size(); ++k) {
        v.u_tilde[k] += w * (v.u_tilde[k] - s.u_tilde[k]);
        v.zeta[k] += w * (v.zeta[k] - s.zeta[k]);
      }
      for (size_t b = 0; b < v.x_copy.size(); ++b) {
        for (size_t k = 0; k < v.x_copy[b].size(); ++k) {
          v.x_copy[b][k] += w * (v.x_copy[b][k] - s.x_copy[b][k]);
          v.y[b][k] += w * (v.y[b][k] - s.y[b][k]);
        }
        v.t_copy[b] += w * (v.t_copy[b] - s.t_copy[b]);
        v.eta[b] += w * (v.eta[b] - s.eta[b]);
      }
      for (size_t k = 0; k < v.lambda.size(); ++k) {
        v.lambda[k] += w * (v.lambda[k] - s.lambda[k]);
      }
      v.nu += w * (v.nu - s.nu);
    }
  }

  double eta_;
  double alpha_ = 1.0;
  double c_prev_ = 0.0;
  std::vector<Snapshot> snapshot_;
};

}  // namespace
}  // namespace penalty

std::unique_ptr<PenaltyScheme> make_scheme(const std::string& name,
                                           const penalty::ApParams& ap_params) {
  if (name == "fixed") return std::make_unique<penalty::FixedScheme>();
  if (name == "rb") return std::make_unique<penalty::RbScheme>(false, ap_params.freq);
  if (name == "rb-inverted") return std::make_unique<penalty::RbScheme>(true, ap_params.freq);
  if (name == "na") return std::make_unique<penalty::NaScheme>(0.9);
  if (name == "ap") return std::make_unique<penalty::ApScheme>(ap_params);
  throw std::invalid_argument("unknown penalty scheme '" + name + "'");
}

}  // namespace swarm
