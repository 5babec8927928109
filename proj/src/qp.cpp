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

#include "swarm/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarm::qp {

namespace {
constexpr double kTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

HalfPlane linearize_keepout(const Eigen::Vector2d& p_nominal, const Eigen::Vector2d& center,
                            double radius) {
  const Eigen::Vector2d d = p_nominal - center;
  const double norm = d.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument("linearize_keepout: nominal coincides with the center");
  }
  HalfPlane hp;
  hp.normal = d / norm;
  hp.offset = radius + hp.normal.dot(center);
  return hp;
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

double project_box(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                  const Eigen::MatrixXd& CE, const Eigen::VectorXd& ce,
                  const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci) {
  const int n = static_cast<int>(G.rows());
  const int n_eq = static_cast<int>(CE.cols());
  const int n_in = static_cast<int>(CI.cols());

  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("solve_qp: G must be positive definite");
  }

  QpResult result;
  result.x = llt.solve(g);

  // Active set: equality columns first (never droppable), then inequalities.
  std::vector<int> active;       // inequality indices
  std::vector<double> u_active;  // their multipliers
  Eigen::VectorXd u_eq = Eigen::VectorXd::Zero(n_eq);

  // Direction step for an incoming normal np given the current active set:
  // z = primal direction, r = dual direction over [equalities, active].
  auto directions = [&](const Eigen::VectorXd& np, Eigen::VectorXd& z, Eigen::VectorXd& r) -> bool {
    const int na = n_eq + static_cast<int>(active.size());
    const Eigen::VectorXd ginv_np = llt.solve(np);
    if (na == 0) {
      z = ginv_np;
      r.resize(0);
      return true;
    }
    Eigen::MatrixXd nmat(n, na);
    for (int e = 0; e < n_eq; ++e) nmat.col(e) = CE.col(e);
    for (size_t a = 0; a < active.size(); ++a) nmat.col(n_eq + a) = CI.col(active[a]);
    const Eigen::MatrixXd b = llt.solve(nmat);
    const Eigen::MatrixXd s = nmat.transpose() * b;
    const Eigen::VectorXd rhs = b.transpose() * np * 1.0;
    Eigen::LDLT<Eigen::MatrixXd> sldlt(s);
    r = sldlt.solve(rhs);
    if ((s * r - rhs).norm() > 1e-6 * (1.0 + rhs.norm())) return false;  // dependent set
    z = ginv_np - b * r;
    return true;
  };

  // A single dual active-set insertion of constraint (np, bound). Equalities
  // pass is_eq so their steps may go in either direction and they are never
  // considered blocking candidates for themselves.
  auto add_constraint = [&](const Eigen::VectorXd& np, double bound, bool is_eq, int idx) -> bool {
    double u_new = 0.0;
    const int max_pivots = 4 * (n_eq + n_in + 1);
    for (int pivot = 0; pivot < max_pivots; ++pivot) {
      const double slack = np.dot(result.x) - bound;
      if (is_eq ? std::abs(slack) <= kTol * (1.0 + std::abs(bound)) :
                  slack >= -kTol * (1.0 + std::abs(bound))) {
        if (is_eq || u_new > 0.0) {
          if (is_eq) {
            u_eq[idx] = u_new;
          } else {
            active.push_back(idx);
            u_active.push_back(u_new);
          }
        }
        return true;
      }

      Eigen::VectorXd z, r;
      if (!directions(np, z, r)) return false;
      const double znp = z.dot(np);
      const bool z_zero = std::abs(znp) <= kTol * (1.0 + np.squaredNorm());

      // Full step removes the violation entirely.
      double t_full = kInf;
      if (!z_zero) t_full = -slack / znp;
      if (is_eq && !z_zero) {
        // Equality steps may be negative; take it directly (no blocking is
        // possible while only equalities are active).
        result.x += t_full * z;
        for (int e = 0; e < n_eq; ++e) u_eq[e] -= t_full * r[e];
        u_eq[idx] = u_new + t_full;
        return true;
      }

      // Partial step: first active inequality whose multiplier hits zero.
      double t_partial = kInf;
      int blocking = -1;
      for (size_t a = 0; a < active.size(); ++a) {
        const double ra = r[n_eq + a];
        if (ra > kTol) {
          const double t = u_active[a] / ra;
          if (t < t_partial) {
            t_partial = t;
            blocking = static_cast<int>(a);
          }
        }
      }

      const double t = std::min(t_full, t_partial);
      if (t == kInf) return false;  // no direction reduces the violation

      if (!z_zero) result.x += t * z;
      for (int e = 0; e < n_eq; ++e) u_eq[e] -= t * r[e];
      for (size_t a = 0; a < active.size(); ++a) u_active[a] -= t * r[n_eq + a];
      u_new += t;

      if (t == t_full && t_full <= t_partial) {
        active.push_back(idx);
        u_active.push_back(u_new);
        return true;
      }
      active.erase(active.begin() + blocking);
      u_active.erase(u_active.begin() + blocking);
    }
    return false;
  };

  for (int e = 0; e < n_eq; ++e) {
    if (!add_constraint(CE.col(e), ce[e], true, e)) {
      result.feasible = false;
      return result;
    }
  }

  const int max_outer = 4 * (n_in + 1) * (n_in + 1) + 16;
  for (int outer = 0; outer < max_outer; ++outer) {
    int worst = -1;
    double worst_violation = kTol;
    for (int i = 0; i < n_in; ++i) {
      if (std::find(active.begin(), active.end(), i) != active.end()) continue;
      const double viol = (ci[i] - CI.col(i).dot(result.x)) / (1.0 + std::abs(ci[i]));
      if (viol > worst_violation) {
        worst_violation = viol;
        worst = i;
      }
    }
    if (worst < 0) return result;
    if (!add_constraint(CI.col(worst), ci[worst], false, worst)) {
      result.feasible = false;
      return result;
    }
  }
  result.feasible = false;
  return result;
}

namespace {

// Quadratic-slack relaxation: minimize the original objective plus a stiff
// penalty on constraint violations. Always consistent, so it serves as the
// least-violation fallback when the linearized set is empty.
QpResult solve_relaxed(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                       const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci) {
  const int n = static_cast<int>(G.rows());
  const int m = static_cast<int>(CI.cols());
  const double stiff = 1e6 * G.diagonal().maxCoeff();

  Eigen::MatrixXd g_aug = Eigen::MatrixXd::Zero(n + m, n + m);
  g_aug.topLeftCorner(n, n) = G;
  g_aug.bottomRightCorner(m, m) = stiff * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n + m);
  lin.head(n) = g;

  Eigen::MatrixXd ci_aug = Eigen::MatrixXd::Zero(n + m, 2 * m);
  Eigen::VectorXd bound_aug(2 * m);
  for (int j = 0; j < m; ++j) {
    ci_aug.col(j).head(n) = CI.col(j);
    ci_aug(n + j, j) = 1.0;  // a'x + s_j >= b_j
    bound_aug[j] = ci[j];
    ci_aug(n + j, m + j) = 1.0;  // s_j >= 0
    bound_aug[m + j] = 0.0;
  }
  QpResult relaxed = solve_qp(g_aug, lin, Eigen::MatrixXd(n + m, 0), Eigen::VectorXd(0), ci_aug,
                              bound_aug);
  QpResult out;
  out.x = relaxed.x.head(n);
  out.feasible = false;
  return out;
}

}  // namespace

SafeResult solve_state_safe(const Eigen::Vector3d& own_anchor, double rho,
                            const Eigen::VectorXd& stack_anchor, double mu,
                            const std::vector<StackConstraint>& constraints) {
  const int dim = static_cast<int>(stack_anchor.size());
  Eigen::MatrixXd g_mat = mu * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd g_vec = mu * stack_anchor;
  for (int c = 0; c < 3; ++c) {
    g_mat(c, c) += rho;
    g_vec[c] += rho * own_anchor[c];
  }

  const int m = static_cast<int>(constraints.size());
  Eigen::MatrixXd ci_mat = Eigen::MatrixXd::Zero(dim, m);
  Eigen::VectorXd ci_vec(m);
  for (int j = 0; j < m; ++j) {
    const StackConstraint& c = constraints[j];
    ci_mat(3 * c.block_a + 0, j) += c.normal.x();
    ci_mat(3 * c.block_a + 1, j) += c.normal.y();
    if (c.block_b >= 0) {
      ci_mat(3 * c.block_b + 0, j) -= c.normal.x();
      ci_mat(3 * c.block_b + 1, j) -= c.normal.y();
    }
    ci_vec[j] = c.offset;
  }

  QpResult r = solve_qp(g_mat, g_vec, Eigen::MatrixXd(dim, 0), Eigen::VectorXd(0), ci_mat, ci_vec);
  if (!r.feasible) r = solve_relaxed(g_mat, g_vec, ci_mat, ci_vec);
  return {r.x, r.feasible};
}

SafeResult solve_time_safe(double own_anchor, double sigma, const Eigen::VectorXd& stack_anchor,
                           double gamma, const TimeSequenceSpec* seq, double t_min, double t_max) {
  const int dim = static_cast<int>(stack_anchor.size());
  Eigen::MatrixXd g_mat = gamma * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd g_vec = gamma * stack_anchor;
  g_mat(0, 0) += sigma;
  g_vec[0] += sigma * own_anchor;

  std::vector<Eigen::VectorXd> eq_rows, in_rows;
  std::vector<double> eq_b, in_b;
  {
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(dim);
    e0[0] = 1.0;
    in_rows.push_back(e0);
    in_b.push_back(t_min);
    in_rows.push_back(-e0);
    in_b.push_back(-t_max);
  }
  if (seq != nullptr) {
    for (int rix = 0; rix < seq->matrix_a.rows(); ++rix) {
      const Eigen::VectorXd row = seq->matrix_a.row(rix).transpose();
      if (seq->relax[rix] <= 0.0) {
        eq_rows.push_back(row);
        eq_b.push_back(seq->t_delta[rix]);
      } else {
        in_rows.push_back(row);
        in_b.push_back(seq->t_delta[rix] - seq->relax[rix]);
        in_rows.push_back(-row);
        in_b.push_back(-(seq->t_delta[rix] + seq->relax[rix]));
      }
    }
  }

  Eigen::MatrixXd ce_mat(dim, eq_rows.size());
  Eigen::VectorXd ce_vec(eq_rows.size());
  for (size_t j = 0; j < eq_rows.size(); ++j) {
    ce_mat.col(j) = eq_rows[j];
    ce_vec[j] = eq_b[j];
  }
  Eigen::MatrixXd ci_mat(dim, in_rows.size());
  Eigen::VectorXd ci_vec(in_rows.size());
  for (size_t j = 0; j < in_rows.size(); ++j) {
    ci_mat.col(j) = in_rows[j];
    ci_vec[j] = in_b[j];
  }

  QpResult r = solve_qp(g_mat, g_vec, ce_mat, ce_vec, ci_mat, ci_vec);
  if (!r.feasible) {
    // Fold equalities into the relaxed form as paired inequalities.
    Eigen::MatrixXd all(dim, ci_mat.cols() + 2 * ce_mat.cols());
    Eigen::VectorXd allb(ci_vec.size() + 2 * ce_vec.size());
    all.leftCols(ci_mat.cols()) = ci_mat;
    allb.head(ci_vec.size()) = ci_vec;
    for (int j = 0; j < ce_mat.cols(); ++j) {
      all.col(ci_mat.cols() + 2 * j) = ce_mat.col(j);
      allb[ci_vec.size() + 2 * j] = ce_vec[j];
      all.col(ci_mat.cols() + 2 * j + 1) = -ce_mat.col(j);
      allb[ci_vec.size() + 2 * j + 1] = -ce_vec[j];
    }
    r = solve_relaxed(g_mat, g_vec, all, allb);
  }
  return {r.x, r.feasible};
}

}  // namespace swarm::qp
