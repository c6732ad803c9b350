// Copyright 2026 The subris Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBRIS_SOLVERS_SOCP_HPP_
#define SUBRIS_SOLVERS_SOCP_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "subris/solvers/common.hpp"
#include "subris/types.hpp"

namespace subris {

/// ‖A x + b‖ ≤ cᵀx + d.
struct SecondOrderCone {
  RMat A;
  RVec b;
  RVec c;
  double d = 0.0;

  double lhs(const RVec& x) const { return (A * x + b).norm(); }
  double rhs(const RVec& x) const { return c.dot(x) + d; }
  double scale() const {
    double s = std::max({A.size() ? A.cwiseAbs().maxCoeff() : 0.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0,
                         c.size() ? c.cwiseAbs().maxCoeff() : 0.0, std::abs(d)});
    return s > 1e-300 ? s : 1.0;
  }
};

/// minimize xᵀPx + qᵀx s.t. second-order cones and G x ≤ h.
struct SocpProblem {
  RMat P;
  RVec q;
  std::vector<SecondOrderCone> cones;
  RMat G;
  RVec h;

  Index size() const { return q.size(); }
  Index linear_count() const { return G.rows(); }
  double objective(const RVec& x) const { return x.dot(P * x) + q.dot(x); }
};

struct SocpResult {
  RVec x;
  RVec cone_mu;             // scalar part of each cone dual
  std::vector<RVec> cone_z; // vector part of each cone dual
  RVec linear_duals;
  double max_violation = 0.0;
  SolveReport report;
};

/// Independent KKT residual for the Lagrangian
/// xᵀPx + qᵀx − Σ_i [μ_i(c_iᵀx + d_i) + z_iᵀ(A_i x + b_i)] + λᵀ(Gx − h).
inline double socp_kkt_residual(const SocpProblem& p, const RVec& x, const RVec& mu,
                                const std::vector<RVec>& z, const RVec& lam) {
  RVec g = 2.0 * p.P * x + p.q;
  // Objective magnitude, with a data-intrinsic floor (the size of the
  // unconstrained optimum) so that optima near x = 0 are not over-weighted.
  const double pmag = p.P.size() > 0 ? p.P.cwiseAbs().maxCoeff() * static_cast<double>(p.size()) : 0.0;
  const double floor = pmag > 0 ? p.q.squaredNorm() / (4.0 * pmag) : p.q.norm();
  const double oscale = detail::safe_scale(std::max({std::abs(p.objective(x)), x.dot(p.P * x), std::abs(p.q.dot(x)), floor}));
  double gscale = std::max((2.0 * p.P * x).norm(), p.q.norm());
  double res = 0.0;
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    const auto& k = p.cones[i];
    const double m = mu(static_cast<Index>(i));
    const RVec& zi = z[i];
    const RVec term = m * k.c + k.A.transpose() * zi;
    g -= term;
    gscale = std::max(gscale, term.norm());
    const RVec v = k.A * x + k.b;
    const double u = k.rhs(x);
    res = std::max(res, std::max(0.0, v.norm() - u) / k.scale());
    res = std::max(res, std::max(0.0, zi.norm() - m) / detail::safe_scale(m));
    res = std::max(res, std::abs(m * u + zi.dot(v)) / oscale);
  }
  for (Index j = 0; j < p.linear_count(); ++j) {
    const RVec row = p.G.row(j).transpose();
    const double l = lam(j);
    g += l * row;
    const double slack = p.h(j) - row.dot(x);
    res = std::max(res, std::max(0.0, -l));
    res = std::max(res, std::max(0.0, -slack) / detail::safe_scale(std::max(std::abs(p.h(j)), row.norm() * x.norm())));
    res = std::max(res, std::abs(l * slack) / oscale);
  }
  res = std::max(res, g.norm() / detail::safe_scale(gscale));
  return res;
}

namespace detail {

/// Log-barrier engine for SocpProblem; in phase I a slack s is appended
/// (index n) that relaxes every normalized constraint.
class SocpEngine {
 public:
  SocpEngine(const SocpProblem& p, bool phase_one) : p_(p), phase_one_(phase_one), n_(p.size()) {
    for (const auto& k : p.cones) cscale_.push_back(k.scale());
    for (Index j = 0; j < p.linear_count(); ++j) {
      const double s = std::max(p.G.row(j).cwiseAbs().maxCoeff(), std::abs(p.h(j)));
      lscale_.push_back(s > 1e-300 ? s : 1.0);
    }
  }

  void set_obj_scale(double s) { obj_scale_ = s > 1e-300 ? s : 1.0; }
  void set_s_max(double v) { s_max_ = v; }

  // normalized cone pieces at (x, s)
  bool cone_terms(const RVec& x, double s, std::size_t i, double& u, RVec& v) const {
    const auto& k = p_.cones[i];
    u = (k.c.dot(x) + k.d) / cscale_[i] + (phase_one_ ? s : 0.0);
    v = (k.A * x + k.b) / cscale_[i];
    return u > 0 && u * u - v.squaredNorm() > 0;
  }

  double linear_slack(const RVec& x, double s, Index j) const {
    return (p_.h(j) - p_.G.row(j).dot(x)) / lscale_[static_cast<std::size_t>(j)] + (phase_one_ ? s : 0.0);
  }

  double phi(double t, const RVec& x, double s, bool& ok) const {
    ok = true;
    double v = phase_one_ ? t * s : t * p_.objective(x) / obj_scale_;
    for (std::size_t i = 0; i < p_.cones.size(); ++i) {
      double u;
      RVec w;
      if (!cone_terms(x, s, i, u, w)) {
        ok = false;
        return std::numeric_limits<double>::infinity();
      }
      v -= std::log(u * u - w.squaredNorm());
    }
    for (Index j = 0; j < p_.linear_count(); ++j) {
      const double sl = linear_slack(x, s, j);
      if (!(sl > 0)) {
        ok = false;
        return std::numeric_limits<double>::infinity();
      }
      v -= std::log(sl);
    }
    if (phase_one_) {
      if (!(s_max_ - s > 0)) {
        ok = false;
        return std::numeric_limits<double>::infinity();
      }
      v -= std::log(s_max_ - s);
    }
    return v;
  }

  double newton_step(double t, RVec& x, double& s) const {
    const Index n = n_ + (phase_one_ ? 1 : 0);
    RVec grad = RVec::Zero(n);
    RMat H = RMat::Zero(n, n);
    if (phase_one_) {
      const double d = s_max_ - s;
      grad(n_) = t + 1.0 / d;
      H(n_, n_) = 1.0 / (d * d);
    } else {
      grad.head(n_) = t * (2.0 * p_.P * x + p_.q) / obj_scale_;
      H.topLeftCorner(n_, n_) = 2.0 * t * p_.P / obj_scale_;
    }
    for (std::size_t i = 0; i < p_.cones.size(); ++i) {
      const auto& k = p_.cones[i];
      double u;
      RVec v;
      if (!cone_terms(x, s, i, u, v)) return -1.0;
      const double ph = u * u - v.squaredNorm();
      RVec cc = RVec::Zero(n);
      cc.head(n_) = k.c / cscale_[i];
      if (phase_one_) cc(n_) = 1.0;
      RMat AA = RMat::Zero(k.A.rows(), n);
      AA.leftCols(n_) = k.A / cscale_[i];
      const RVec dphi = 2.0 * u * cc - 2.0 * AA.transpose() * v;
      grad -= dphi / ph;
      H -= (2.0 * cc * cc.transpose() - 2.0 * AA.transpose() * AA) / ph;
      H += dphi * dphi.transpose() / (ph * ph);
    }
    for (Index j = 0; j < p_.linear_count(); ++j) {
      const double sl = linear_slack(x, s, j);
      if (!(sl > 0)) return -1.0;
      RVec gj = RVec::Zero(n);
      gj.head(n_) = p_.G.row(j).transpose() / lscale_[static_cast<std::size_t>(j)];
      if (phase_one_) gj(n_) = -1.0;
      grad += gj / sl;
      H += gj * gj.transpose() / (sl * sl);
    }
    Eigen::LLT<RMat> llt(H);
    RVec dz;
    if (llt.info() == Eigen::Success) {
      dz = -llt.solve(grad);
    } else {
      const double hs = std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      H.diagonal().array() += 1e-12 * hs;
      dz = -H.ldlt().solve(grad);
    }
    const double dec2 = -grad.dot(dz);
    if (!std::isfinite(dec2) || dec2 < 0) return -1.0;
    const RVec dx = dz.head(n_);
    const double ds = phase_one_ ? dz(n_) : 0.0;
    bool ok = true;
    const double f0 = phi(t, x, s, ok);
    // below the rounding level of f the sufficient-decrease test is noise
    const bool unmeasurable = 0.25 * dec2 < 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0));
    double alpha = 1.0;
    for (int ls = 0; ls < 100; ++ls) {
      bool okn = true;
      const double f1 = phi(t, x + alpha * dx, s + alpha * ds, okn);
      if (okn && (f1 <= f0 - 0.25 * alpha * dec2 || unmeasurable || std::sqrt(dec2) < 1e-7)) {
        x += alpha * dx;
        s += alpha * ds;
        return dec2;
      }
      alpha *= 0.5;
    }
    return -1.0;
  }

  double max_violation(const RVec& x) const {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p_.cones.size(); ++i) {
      const auto& k = p_.cones[i];
      v = std::max(v, (k.lhs(x) - k.rhs(x)) / cscale_[i]);
    }
    for (Index j = 0; j < p_.linear_count(); ++j)
      v = std::max(v, (p_.G.row(j).dot(x) - p_.h(j)) / lscale_[static_cast<std::size_t>(j)]);
    return v;
  }

  double barrier_degree() const {
    return 2.0 * static_cast<double>(p_.cones.size()) + static_cast<double>(p_.linear_count());
  }

  void duals(double t, const RVec& x, RVec& mu, std::vector<RVec>& z, RVec& lam) const {
    mu.resize(static_cast<Index>(p_.cones.size()));
    z.assign(p_.cones.size(), RVec());
    for (std::size_t i = 0; i < p_.cones.size(); ++i) {
      double u;
      RVec v;
      cone_terms(x, 0.0, i, u, v);
      const double ph = u * u - v.squaredNorm();
      // barrier duals of the normalized cone, mapped back to the original
      mu(static_cast<Index>(i)) = obj_scale_ * 2.0 * u / (t * ph) / cscale_[i];
      z[i] = -obj_scale_ * 2.0 * v / (t * ph) / cscale_[i];
    }
    lam.resize(p_.linear_count());
    for (Index j = 0; j < p_.linear_count(); ++j)
      lam(j) = obj_scale_ / (t * linear_slack(x, 0.0, j)) / lscale_[static_cast<std::size_t>(j)];
  }

 private:
  const SocpProblem& p_;
  bool phase_one_;
  Index n_;
  std::vector<double> cscale_;
  std::vector<double> lscale_;
  double obj_scale_ = 1.0;
  double s_max_ = 0.0;
};

}  // namespace detail

namespace detail {

/// Minimum-norm correction of the barrier multipliers on the near-active
/// cones and rows. Away from the apex an active cone dual keeps the form
/// z = −μ v/‖v‖ (one unknown); at the apex μ and z are fitted freely.
inline void refine_socp_duals(const SocpProblem& p, const RVec& x, RVec& mu, std::vector<RVec>& z,
                              RVec& lam) {
  const double act = 1e-6;
  RVec g = 2.0 * p.P * x + p.q;
  for (std::size_t i = 0; i < p.cones.size(); ++i)
    g -= mu(static_cast<Index>(i)) * p.cones[i].c + p.cones[i].A.transpose() * z[i];
  for (Index j = 0; j < p.linear_count(); ++j) g += lam(j) * p.G.row(j).transpose();

  struct Slot {
    int kind;  // 0 cone on its face, 1 cone at the apex, 2 row
    Index idx;
    Index col;
  };
  std::vector<RVec> cols;
  std::vector<Slot> slots;
  const double xs = std::max(1.0, x.norm());
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    const auto& k = p.cones[i];
    const RVec v = k.A * x + k.b;
    const double nv = v.norm();
    const double u = k.rhs(x);
    const double tol = act * k.scale() * xs;
    if (u - nv > tol) continue;
    const Index at = static_cast<Index>(cols.size());
    if (nv > tol) {
      cols.push_back(-(k.c - k.A.transpose() * v / nv));
      slots.push_back({0, static_cast<Index>(i), at});
    } else {
      cols.push_back(-k.c);
      for (Index r = 0; r < k.A.rows(); ++r) cols.push_back(-k.A.row(r).transpose());
      slots.push_back({1, static_cast<Index>(i), at});
    }
  }
  for (Index j = 0; j < p.linear_count(); ++j) {
    const RVec row = p.G.row(j).transpose();
    const double slack = p.h(j) - row.dot(x);
    if (slack <= act * std::max({std::abs(p.h(j)), row.norm() * x.norm(), 1e-300})) {
      slots.push_back({2, j, static_cast<Index>(cols.size())});
      cols.push_back(row);
    }
  }
  if (cols.empty()) return;
  RMat A(x.size(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) A.col(static_cast<Index>(c)) = cols[c];
  const RVec d = A.completeOrthogonalDecomposition().solve(-g);
  for (const auto& sl : slots) {
    if (sl.kind == 2) {
      lam(sl.idx) = std::max(lam(sl.idx) + d(sl.col), 0.0);
      continue;
    }
    const auto& k = p.cones[static_cast<std::size_t>(sl.idx)];
    auto& zi = z[static_cast<std::size_t>(sl.idx)];
    double& m = mu(sl.idx);
    if (sl.kind == 0) {
      const RVec v = k.A * x + k.b;
      m += d(sl.col);
      zi -= d(sl.col) * v / v.norm();
    } else {
      m += d(sl.col);
      zi += d.segment(sl.col + 1, k.A.rows());
    }
    m = std::max({m, zi.norm(), 0.0});
  }
}

}  // namespace detail

/// Dense log-barrier interior-point method with a phase-I slack problem.
inline SocpResult solve_socp(const SocpProblem& p, const SolverOptions& opts = {},
                             const RVec* start = nullptr) {
  const Index n = p.size();
  require(p.P.rows() == n && p.P.cols() == n, "solve_socp: P must be n x n");
  require(p.G.cols() == n || p.G.rows() == 0, "solve_socp: G column mismatch");
  require(p.h.size() == p.G.rows(), "solve_socp: h size mismatch");
  for (const auto& k : p.cones)
    require(k.A.cols() == n && k.c.size() == n && k.b.size() == k.A.rows(), "solve_socp: cone shape mismatch");

  SocpResult res;
  int iters = 0;
  RVec x = start != nullptr ? *start : RVec::Zero(n);
  const double gap_tol = 1e-10;

  {
    detail::SocpEngine probe(p, true);
    const double viol = probe.max_violation(x);
    // strict feasibility also needs u > 0 margins, which max_violation < 0 implies
    if (!(viol < 0)) {
      detail::SocpEngine eng(p, true);
      double s = viol + 0.1 * (std::abs(viol) + 1.0);
      eng.set_s_max(s + 10.0 * (std::abs(s) + 1.0));
      double t = 1.0;
      bool found = false;
      bool certified = false;
      while (iters < 4 * opts.max_iter && !found && !certified) {
        for (int k = 0; k < 80 && iters < 4 * opts.max_iter; ++k) {
          const double dec2 = eng.newton_step(t, x, s);
          ++iters;
          if (dec2 < 0) break;
          if (eng.max_violation(x) < 0) {
            found = true;
            break;
          }
          if (dec2 / 2 <= 1e-11) break;
        }
        if (found) break;
        if (s - eng.barrier_degree() / t > 0) certified = true;
        if (eng.barrier_degree() / t < gap_tol) break;
        t *= opts.barrier_mu;
      }
      if (!found) {
        res.x = x;
        res.max_violation = eng.max_violation(x);
        res.report.status = SolveStatus::Infeasible;
        res.report.iterations = iters;
        res.report.objective = p.objective(x);
        res.report.kkt_residual = std::numeric_limits<double>::infinity();
        return res;
      }
    }
  }

  detail::SocpEngine eng(p, false);
  // data-only scale; the objective at a phase-I point can be far off
  eng.set_obj_scale(std::max({p.q.norm(), p.P.size() > 0 ? p.P.cwiseAbs().maxCoeff() : 0.0, 1e-300}));
  double t = 1.0;
  double s = 0.0;
  RVec x_c = x;
  double t_c = 0.0;
  for (;;) {
    bool centered = false;
    for (int k = 0; k < 100 && iters < 4 * opts.max_iter; ++k) {
      const RVec x_prev = x;
      const double dec2 = eng.newton_step(t, x, s);
      ++iters;
      if (dec2 < 0) break;
      // a step that no longer moves x means the decrement is at its
      // conditioning floor
      const bool stalled = (x - x_prev).norm() <= 1e-13 * (1.0 + x.norm());
      if (dec2 / 2 <= 1e-11 || (stalled && dec2 / 2 <= 1e-5)) {
        centered = true;
        break;
      }
    }
    if (!centered) break;
    x_c = x;
    t_c = t;
    if (eng.barrier_degree() / t < gap_tol) break;
    t *= opts.barrier_mu;
  }
  if (t_c > 0) {
    x = x_c;
    t = t_c;
  }
  eng.duals(t, x, res.cone_mu, res.cone_z, res.linear_duals);
  res.x = x;
  res.max_violation = eng.max_violation(x);
  res.report.iterations = iters;
  res.report.objective = p.objective(x);
  res.report.kkt_residual = socp_kkt_residual(p, x, res.cone_mu, res.cone_z, res.linear_duals);
  {
    RVec mu = res.cone_mu, lam = res.linear_duals;
    std::vector<RVec> z = res.cone_z;
    detail::refine_socp_duals(p, x, mu, z, lam);
    const double refined = socp_kkt_residual(p, x, mu, z, lam);
    if (refined < res.report.kkt_residual) {
      res.cone_mu = mu;
      res.cone_z = z;
      res.linear_duals = lam;
      res.report.kkt_residual = refined;
    }
  }
  res.report.status = res.report.kkt_residual <= opts.kkt_tol ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return res;
}

}  // namespace subris

#endif  // SUBRIS_SOLVERS_SOCP_HPP_
