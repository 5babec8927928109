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

#include <memory>
#include <string>

#include "swarm/consensus.hpp"

namespace swarm {

/// Penalty-parameter strategy plugged into Engine::run. update_penalties
/// runs right after the dual ascent and may only change penalty values;
/// post_residuals runs after the residual bookkeeping (the accelerated
/// scheme extrapolates copies and duals there, between iterations).
class PenaltyScheme {
 public:
  virtual ~PenaltyScheme() = default;
  virtual std::string name() const = 0;

  virtual void start(const ConsensusState& state) { (void)state; }
  virtual void update_penalties(ConsensusState& state, const ConsensusState& prev, int n,
                                const ResidualReport* last_report) {
    (void)state; (void)prev; (void)n; (void)last_report;
  }
  virtual bool post_residuals(ConsensusState& state, const ConsensusState& prev, int n,
                              const ResidualReport& report) {
    (void)state; (void)prev; (void)n; (void)report;
    return false;  // true when a momentum restart fired (trace flag)
  }
};

namespace penalty {

/// Tuning constants of the spectral adaptive scheme.
struct ApParams {
  double eps_cor = 0.5;  // correlation safeguard threshold
  double c_cg = 5e2;     // convergence constant bounding each update
  int freq = 10;         // penalties move only when n % freq == 1
};

/// Spectral curvature estimate from iterate differences.
struct SpectralEstimate {
  double sd = 0.0;
  double mg = 0.0;
  double hybrid = 0.0;
  bool valid = false;
};

/// SD/MG pair and hybrid for one family:
///   sd = <dh,dh>/<dp,dh>, mg = <dp,dh>/<dp,dp>,
///   hybrid = mg when 2*mg > sd, else sd - mg/2.
/// Marked invalid when <dp,dh> is not positive (the linear dual model is
/// untrustworthy there).
SpectralEstimate spectral_alpha(const Eigen::VectorXd& delta_primal,
                                const Eigen::VectorXd& delta_dual_hat);

/// Cosine of the angle between the two deltas; 0 for zero vectors.
double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Snapshots of one family at the last update round n_l.
struct FamilyHistory {
  Eigen::VectorXd primal;
  Eigen::VectorXd gside;  // copy/global side of the family
  Eigen::VectorXd dual;
  Eigen::VectorXd hat;    // intermediate (half-step) dual
};

/// One four-case spectral update with the correlation safeguard, then the
/// bounded clamp |log(rho'/rho)| <= log(1 + c_cg/n^2).
double ap_update(const FamilyHistory& hist, const Eigen::VectorXd& primal_now,
                 const Eigen::VectorXd& gside_now, const Eigen::VectorXd& dual_now,
                 const Eigen::VectorXd& hat_now, double current_penalty, const ApParams& params,
                 int n);

/// Residual-balancing rule, as printed: halve when the primal residual
/// dominates tenfold, double when the dual does. `inverted` swaps the two
/// branches (the conventional direction).
double rb_update(double primal_norm, double dual_norm, double penalty, bool inverted);

}  // namespace penalty

/// fixed | rb | rb-inverted | na | ap
std::unique_ptr<PenaltyScheme> make_scheme(const std::string& name,
                                           const penalty::ApParams& ap_params = {});

}  // namespace swarm
