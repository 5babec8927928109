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
#include <optional>
#include <vector>

namespace swarm::qp {

/// Linear keep-out constraint on a 2-D position: normal . p >= offset,
/// with |normal| == 1.
struct HalfPlane {
  Eigen::Vector2d normal;
  double offset;
};

/// Arrival-order constraints over a neighbor time stack. Each row pairs
/// the owner (+1 at column 0) with one neighbor (-1 at its column); rows
/// sum to zero. |A t - t_delta| <= relax elementwise; relax == 0 rows are
/// enforced as equalities.
struct TimeSequenceSpec {
  Eigen::MatrixXd matrix_a;
  Eigen::VectorXd t_delta;
  Eigen::VectorXd relax;
};

/// Tangent half-plane of a circular keep-out, taken at the nominal
/// direction: normal = (p_nom - c)/|p_nom - c|, offset = radius + normal.c.
/// Throws std::invalid_argument when p_nominal coincides with the center.
HalfPlane linearize_keepout(const Eigen::Vector2d& p_nominal, const Eigen::Vector2d& center,
                            double radius);

/// Elementwise clamp; the exact minimizer of a diagonal quadratic over a box.
Eigen::VectorXd project_box(const Eigen::VectorXd& v, double lo, double hi);
double project_box(double v, double lo, double hi);

/// Dense strictly convex QP
///   min 1/2 x'Gx - g'x   s.t.  CE' x = ce,  CI' x >= ci
/// solved with a dual active-set method (Goldfarb-Idnani pivoting with
/// dense re-factorization; instances here have at most a few dozen
/// variables). Returns feasible=false when the constraints are
/// inconsistent.
struct QpResult {
  Eigen::VectorXd x;
  bool feasible = true;
};

QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                  const Eigen::MatrixXd& CE, const Eigen::VectorXd& ce,
                  const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci);

/// Pairwise or single-block linear constraint over a stacked state
/// (3 values per block, constraints act on the position components):
///   normal . (p[block_a] - p[block_b]) >= offset,   block_b == -1 for
///   constraints on block_a alone.
struct StackConstraint {
  int block_a = 0;
  int block_b = -1;
  Eigen::Vector2d normal;
  double offset = 0.0;
};

/// One-instant safe-copy state update over the stacked neighbor view.
/// Minimizes  rho/2 |s_0 - own_anchor|^2 + mu/2 |s - stack_anchor|^2
/// over the stack s (blocks of 3), subject to the listed constraints.
/// Falls back to the least-violation point (quadratic slack relaxation)
/// when the linearization is inconsistent; `feasible` reports which.
struct SafeResult {
  Eigen::VectorXd stack;
  bool feasible = true;
};

SafeResult solve_state_safe(const Eigen::Vector3d& own_anchor, double rho,
                            const Eigen::VectorXd& stack_anchor, double mu,
                            const std::vector<StackConstraint>& constraints);

/// One-agent safe time update over the stacked neighbor times.
/// Minimizes sigma/2 (t_0 - own_anchor)^2 + gamma/2 |t - stack_anchor|^2
/// subject to t_min <= t_0 <= t_max and the sequence rows when present.
SafeResult solve_time_safe(double own_anchor, double sigma, const Eigen::VectorXd& stack_anchor,
                           double gamma, const TimeSequenceSpec* seq, double t_min, double t_max);

}  // namespace swarm::qp
