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

#ifndef SUBRIS_SOLVERS_QUAD_MAX_HPP_
#define SUBRIS_SOLVERS_QUAD_MAX_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "subris/solvers/common.hpp"
#include "subris/types.hpp"

namespace subris {

/// wᴴ S w ≤ bound, with S = I when `identity` is set (S is then unused).
struct QuadConstraint {
  CMat S;
  bool identity = false;
  double bound = 0.0;

  static QuadConstraint norm_ball(double bound) { return QuadConstraint{CMat(), true, bound}; }

  CVec apply(const CVec& w) const { return identity ? w : CVec(S * w); }
  double value(const CVec& w) const { return identity ? w.squaredNorm() : w.dot(S * w).real(); }
};

/// maximize Re{xᴴw} − wᴴYw subject to the listed constraints, and w real
/// nonnegative when `nonneg` is set.
struct QuadMaxProblem {
  CVec x;
  CMat Y;
  std::vector<QuadConstraint> constraints;
  bool nonneg = false;

  Index size() const { return x.size(); }
  double objective(const CVec& w) const { return x.dot(w).real() - w.dot(Y * w).real(); }
};

struct QuadMaxResult {
  CVec w;
  RVec multipliers;  // one per constraint
  SolveReport report;
};

namespace detail {

struct LagrangianPoint {
  CVec w;
  bool finite = true;
};

/// w = (2H)⁺ x from an eigendecomposition of a Hermitian PSD H. Reports an
/// infinite point when x has weight on the numerical null space of H.
class ShiftedEigenSolver {
 public:
  ShiftedEigenSolver(const CMat& H, const CVec& x) {
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    evals_ = es.eigenvalues().cwiseMax(0.0);
    V_ = es.eigenvectors();
    c_ = V_.adjoint() * x;
    scale_ = std::max(evals_.size() > 0 ? evals_.maxCoeff() : 0.0, 1e-300);
    cnorm_ = c_.norm();
  }

  /// Stationary point of Re{xᴴw} − wᴴ(H + λI)w.
  LagrangianPoint point(double lambda) const {
    LagrangianPoint p;
    CVec z(c_.size());
    for (Index i = 0; i < c_.size(); ++i) {
      const double den = evals_(i) + lambda;
      if (den <= 1e-13 * (scale_ + lambda)) {
        if (std::abs(c_(i)) > 1e-12 * cnorm_) p.finite = false;
        z(i) = 0.0;
      } else {
        z(i) = c_(i) / (2.0 * den);
      }
    }
    p.w = V_ * z;
    return p;
  }

 private:
  RVec evals_;
  CMat V_;
  CVec c_;
  double scale_ = 1.0;
  double cnorm_ = 0.0;
};

inline LagrangianPoint stationary_point(const CMat& H, const CVec& x) {
  return ShiftedEigenSolver(H, x).point(0.0);
}

/// Smallest multiplier λ ≥ 0 whose stationary point satisfies the
/// constraint, found by geometric bisection. The returned point is the
/// feasible (upper) end of the final bracket.
template <class PointFn, class ValueFn>
double bisect_multiplier(PointFn&& point, ValueFn&& value, double bound, double hint,
                         const SolverOptions& opts, LagrangianPoint& out, int& iters,
                         bool& bracket_ok) {
  bracket_ok = true;
  auto feasible = [&](const LagrangianPoint& p) { return p.finite && value(p.w) <= bound; };
  LagrangianPoint p0 = point(0.0);
  ++iters;
  if (feasible(p0)) {
    out = std::move(p0);
    return 0.0;
  }
  double hi = (hint > 0 && std::isfinite(hint)) ? hint : 1.0;
  LagrangianPoint phi = point(hi);
  ++iters;
  int guard = 0;
  while (!feasible(phi)) {
    hi *= 4.0;
    phi = point(hi);
    ++iters;
    if (++guard > 1000) {
      bracket_ok = false;
      out = std::move(phi);
      return hi;
    }
  }
  double lo = hi;
  guard = 0;
  for (;;) {
    lo /= 4.0;
    LagrangianPoint plo = point(lo);
    ++iters;
    if (!feasible(plo)) break;
    hi = lo;
    phi = std::move(plo);
    if (++guard > 1000 || lo < 1e-300) {
      out = std::move(phi);
      return hi;
    }
  }
  while (hi / lo - 1.0 > opts.bisection_tol) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    LagrangianPoint pm = point(mid);
    ++iters;
    if (feasible(pm)) {
      hi = mid;
      phi = std::move(pm);
    } else {
      lo = mid;
    }
  }
  out = std::move(phi);
  return hi;
}

/// minimize aᵀHa − dᵀa over a ≥ 0 by a primal active-set method; H real
/// symmetric PSD. Exact up to the linear solves.
inline RVec nonneg_qp(const RMat& H, const RVec& d, int max_iter, int& iters, bool& converged) {
  const Index n = d.size();
  RVec a = RVec::Zero(n);
  std::vector<char> free(static_cast<std::size_t>(n), 0);
  const double hscale = std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const double reg = 1e-13 * hscale;
  converged = false;
  auto solve_free = [&](RVec& z) {
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i)
      if (free[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Index f = static_cast<Index>(idx.size());
    RMat Hf(f, f);
    RVec df(f);
    for (Index r = 0; r < f; ++r) {
      df(r) = d(idx[r]);
      for (Index c = 0; c < f; ++c) Hf(r, c) = 2.0 * H(idx[r], idx[c]);
      Hf(r, r) += 2.0 * reg;
    }
    RVec zf = Hf.ldlt().solve(df);
    z = RVec::Zero(n);
    for (Index r = 0; r < f; ++r) z(idx[r]) = zf(r);
  };
  const int cap = std::max(max_iter, 4 * static_cast<int>(n) + 20);
  for (int outer = 0; outer < cap; ++outer) {
    ++iters;
    const RVec grad = 2.0 * H * a - d;
    const double gscale = std::max(d.cwiseAbs().maxCoeff(), (2.0 * H * a).cwiseAbs().maxCoeff());
    Index j = -1;
    double most = -1e-12 * std::max(gscale, 1e-300);
    for (Index i = 0; i < n; ++i)
      if (!free[static_cast<std::size_t>(i)] && grad(i) < most) {
        most = grad(i);
        j = i;
      }
    if (j < 0) {
      converged = true;
      return a;
    }
    free[static_cast<std::size_t>(j)] = 1;
    for (int inner = 0; inner <= n; ++inner) {
      RVec z;
      solve_free(z);
      double alpha = 1.0;
      Index block = -1;
      for (Index i = 0; i < n; ++i)
        if (free[static_cast<std::size_t>(i)] && z(i) <= 0.0) {
          const double step = a(i) / (a(i) - z(i));
          if (step < alpha) {
            alpha = step;
            block = i;
          }
        }
      if (block < 0) {
        a = z;
        break;
      }
      a += alpha * (z - a);
      for (Index i = 0; i < n; ++i)
        if (free[static_cast<std::size_t>(i)] && (a(i) <= 1e-300 || i == block)) {
          a(i) = 0.0;
          free[static_cast<std::size_t>(i)] = 0;
        }
    }
  }
  return a;
}

inline double objective_scale(const QuadMaxProblem& p, const CVec& w) {
  const double ymag = p.Y.size() > 0 ? p.Y.cwiseAbs().maxCoeff() * static_cast<double>(p.size()) : 0.0;
  const double floor = ymag > 0 ? p.x.squaredNorm() / (4.0 * ymag) : 0.0;
  return safe_scale(std::max({std::abs(p.x.dot(w).real()), w.dot(p.Y * w).real(), floor, 1e-300}));
}

}  // namespace detail

/// Independent KKT residual of a candidate (w, λ) for a QuadMaxProblem:
/// worst of relative stationarity, complementarity and primal violation.
inline double quad_max_kkt_residual(const QuadMaxProblem& p, const CVec& w, const RVec& lambda) {
  const double obj_scale = detail::objective_scale(p, w);
  CVec grad = 2.0 * (p.Y * w) - p.x;  // gradient of the negated Lagrangian part
  for (std::size_t j = 0; j < p.constraints.size(); ++j)
    grad += 2.0 * lambda(static_cast<Index>(j)) * p.constraints[j].apply(w);
  double res = 0.0;
  const double gscale = detail::safe_scale(std::max(p.x.norm(), (2.0 * p.Y * w).norm()));
  if (p.nonneg) {
    for (Index i = 0; i < w.size(); ++i) {
      const double gi = grad(i).real();
      const double wi = w(i).real();
      res = std::max(res, std::abs(w(i).imag()) / detail::safe_scale(w.norm()));
      if (wi < 0) res = std::max(res, -wi / detail::safe_scale(w.norm()));
      // ν_i = g_i must be ≥ 0, and vanish where w_i > 0
      res = std::max(res, std::max(0.0, -gi) / gscale);
      res = std::max(res, std::abs(gi * wi) / obj_scale);
    }
  } else {
    res = std::max(res, grad.norm() / gscale);
  }
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    const double g = c.value(w);
    const double lam = lambda(static_cast<Index>(j));
    res = std::max(res, std::max(0.0, -lam));
    res = std::max(res, std::max(0.0, g - c.bound) / detail::safe_scale(std::max(c.bound, 1e-300)));
    res = std::max(res, lam * std::abs(c.bound - g) / obj_scale);
  }
  return res;
}

/// Concave QCQP with at most two ellipsoidal constraints, solved through
/// its dual: stationary points w(λ) = (2Y + 2Σλ_j S_j)⁻¹x and bisection on
/// the multipliers (nested for two constraints). The nonnegative variant
/// replaces the closed-form stationary point with an exact active-set
/// nonnegative QP.
inline QuadMaxResult solve_quad_max(const QuadMaxProblem& p, const SolverOptions& opts = {}) {
  const Index n = p.size();
  require(p.Y.rows() == n && p.Y.cols() == n, "solve_quad_max: Y must be n x n");
  require(p.constraints.size() <= 2, "solve_quad_max: at most two constraints");
  for (const auto& c : p.constraints)
    require(c.identity || (c.S.rows() == n && c.S.cols() == n), "solve_quad_max: S must be n x n");
  require(!p.nonneg || p.constraints.size() <= 1, "solve_quad_max: nonneg supports one constraint");

  QuadMaxResult res;
  res.multipliers = RVec::Zero(static_cast<Index>(p.constraints.size()));
  res.w = CVec::Zero(n);
  for (const auto& c : p.constraints) {
    if (c.bound < 0) {
      res.report.status = SolveStatus::Infeasible;
      res.report.kkt_residual = std::numeric_limits<double>::infinity();
      return res;
    }
  }
  int iters = 0;
  bool ok = true;

  if (p.nonneg) {
    const RMat R = p.Y.real();
    const RVec d = p.x.real();
    bool inner_ok = true;
    auto point = [&](const RMat& H) {
      bool conv = false;
      RVec a = detail::nonneg_qp(H, d, opts.max_iter, iters, conv);
      inner_ok = inner_ok && conv;
      detail::LagrangianPoint lp;
      lp.w = a.cast<cd>();
      lp.finite = a.allFinite();
      return lp;
    };
    if (p.constraints.empty()) {
      res.w = point(R).w;
    } else {
      const QuadConstraint& c = p.constraints.front();
      const RMat T = c.identity ? RMat(RMat::Identity(n, n)) : RMat(c.S.real());
      detail::LagrangianPoint out;
      const double hint = d.norm() / (2.0 * std::sqrt(std::max(c.bound, 1e-300)) *
                                      std::sqrt(std::max(T.diagonal().maxCoeff(), 1e-300)));
      res.multipliers(0) = detail::bisect_multiplier(
          [&](double lam) { return point(R + lam * T); },
          [&](const CVec& w) { return c.value(w); }, c.bound, hint, opts, out, iters, ok);
      res.w = out.w;
    }
    ok = ok && inner_ok;
  } else if (p.constraints.empty()) {
    auto lp = detail::stationary_point(p.Y, p.x);
    ++iters;
    ok = lp.finite;
    res.w = lp.w;
  } else {
    // Inner constraint: the identity one when present, so each inner
    // solve is a single eigendecomposition plus diagonal scalings.
    std::size_t inner = 0;
    if (p.constraints.size() == 2 && !p.constraints[0].identity && p.constraints[1].identity)
      inner = 1;
    const QuadConstraint& c1 = p.constraints[inner];
    const QuadConstraint* c2 = p.constraints.size() == 2 ? &p.constraints[1 - inner] : nullptr;
    double last_lambda1 = 0.0;

    auto solve_inner = [&](double lambda2) {
      CMat H0 = p.Y;
      if (c2 != nullptr && lambda2 > 0)
        H0 += lambda2 * (c2->identity ? CMat(CMat::Identity(n, n)) : c2->S);
      detail::LagrangianPoint out;
      bool inner_ok = true;
      const double v = c1.identity ? 1.0 : std::max(c1.S.diagonal().real().maxCoeff(), 1e-300);
      const double hint = p.x.norm() / (2.0 * std::sqrt(std::max(c1.bound, 1e-300) / v) * v);
      if (c1.identity) {
        detail::ShiftedEigenSolver es(H0, p.x);
        last_lambda1 = detail::bisect_multiplier(
            [&](double lam) { return es.point(lam); },
            [&](const CVec& w) { return c1.value(w); }, c1.bound, hint, opts, out, iters, inner_ok);
      } else {
        last_lambda1 = detail::bisect_multiplier(
            [&](double lam) { return detail::stationary_point(H0 + lam * c1.S, p.x); },
            [&](const CVec& w) { return c1.value(w); }, c1.bound, hint, opts, out, iters, inner_ok);
      }
      ok = ok && inner_ok;
      return out;
    };

    if (c2 == nullptr) {
      res.w = solve_inner(0.0).w;
      res.multipliers(static_cast<Index>(inner)) = last_lambda1;
    } else {
      detail::LagrangianPoint out;
      const double v2 = c2->identity ? 1.0 : std::max(c2->S.diagonal().real().maxCoeff(), 1e-300);
      const double hint = p.x.norm() / (2.0 * std::sqrt(std::max(c2->bound, 1e-300) / v2) * v2);
      bool outer_ok = true;
      const double lambda2 = detail::bisect_multiplier(
          solve_inner, [&](const CVec& w) { return c2->value(w); }, c2->bound, hint, opts, out,
          iters, outer_ok);
      ok = ok && outer_ok;
      res.w = out.w;
      // recompute the inner multiplier consistently with the returned point
      res.w = solve_inner(lambda2).w;
      res.multipliers(static_cast<Index>(inner)) = last_lambda1;
      res.multipliers(static_cast<Index>(1 - inner)) = lambda2;
    }
  }

  res.report.iterations = iters;
  res.report.objective = p.objective(res.w);
  res.report.kkt_residual = quad_max_kkt_residual(p, res.w, res.multipliers);
  res.report.status = (ok && res.report.kkt_residual <= opts.kkt_tol) ? SolveStatus::Optimal
                                                                     : SolveStatus::MaxIter;
  return res;
}

}  // namespace subris

#endif  // SUBRIS_SOLVERS_QUAD_MAX_HPP_
