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

// Independent reference routines for the solver layer: KKT residuals
// recomputed from scratch, conic reformulations, grid search and random
// problem generators.

#ifndef SUBRIS_TESTS_ORACLE_SOLVER_ORACLE_HPP_
#define SUBRIS_TESTS_ORACLE_SOLVER_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "oracle/dense_oracle.hpp"
#include "subris/solvers/box_qcqp.hpp"
#include "subris/solvers/quad_max.hpp"
#include "subris/solvers/socp.hpp"

namespace oracle {

// [Re; Im] stacking, independent of the solvers' interleaved layout.
inline RMat real_form(const CMat& A) {
  const Index n = A.rows();
  RMat R(2 * n, 2 * n);
  R << A.real(), -A.imag(), A.imag(), A.real();
  return R;
}
inline RVec real_vec(const CVec& v) {
  RVec r(2 * v.size());
  r << v.real(), v.imag();
  return r;
}
inline CVec complex_vec(const RVec& r) {
  const Index n = r.size() / 2;
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cd(r(i), r(n + i));
  return v;
}
inline RMat psd_sqrt(const RMat& A) {
  Eigen::SelfAdjointEigenSolver<RMat> es(A);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Stationarity, sign, feasibility and complementarity recomputed from
// scratch, without the solver's own residual routine.
inline double quad_kkt(const QuadMaxProblem& p, const CVec& w, const RVec& lam) {
  CVec g = p.x - 2.0 * p.Y * w;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    g -= 2.0 * lam(static_cast<Index>(j)) * (c.identity ? w : CVec(c.S * w));
  }
  const double scale = std::max({p.x.norm(), 2.0 * (p.Y * w).norm(), 1e-300});
  double r = 0.0;
  if (p.nonneg) {
    // g = −ν with ν ≥ 0 and ν_i w_i = 0
    for (Index i = 0; i < w.size(); ++i) {
      r = std::max(r, std::max(0.0, g(i).real()) / scale);
      r = std::max(r, std::abs(g(i).real() * w(i).real()) / (scale * std::max(w.norm(), 1e-300)));
      r = std::max(r, std::max(0.0, -w(i).real()) / std::max(w.norm(), 1e-300));
    }
  } else {
    r = g.norm() / scale;
  }
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    const double v = c.value(w);
    const double l = lam(static_cast<Index>(j));
    r = std::max(r, std::max(0.0, -l));
    r = std::max(r, std::max(0.0, v - c.bound) / c.bound);
    const double ymag = p.Y.cwiseAbs().maxCoeff() * static_cast<double>(p.size());
    const double oscale = std::max({std::abs(p.objective(w)) + w.dot(p.Y * w).real(),
                                    p.x.squaredNorm() / (4.0 * ymag), 1e-300});
    r = std::max(r, l * std::abs(c.bound - v) / oscale);
  }
  return r;
}

// Same problem as a conic program, solved by the barrier SOCP engine.
inline double quad_max_via_socp(const QuadMaxProblem& p, CVec* w_out = nullptr) {
  SocpProblem s;
  if (p.nonneg) {
    const Index n = p.size();
    s.P = p.Y.real();
    s.q = -p.x.real();
    s.G = -RMat::Identity(n, n);
    s.h = RVec::Zero(n);
    for (const auto& c : p.constraints) {
      SecondOrderCone k;
      k.A = psd_sqrt(c.identity ? RMat(RMat::Identity(n, n)) : RMat(c.S.real()));
      k.b = RVec::Zero(n);
      k.c = RVec::Zero(n);
      k.d = std::sqrt(c.bound);
      s.cones.push_back(k);
    }
    const RVec start = RVec::Constant(n, 1e-6);
    const SocpResult r = solve_socp(s, SolverOptions{}, &start);
    if (!r.report.ok()) return std::numeric_limits<double>::quiet_NaN();
    if (w_out) *w_out = r.x.cast<cd>();
    return -r.report.objective;
  }
  const Index n = 2 * p.size();
  s.P = real_form(p.Y);
  s.q = -real_vec(p.x);
  s.G = RMat(0, n);
  s.h = RVec(0);
  for (const auto& c : p.constraints) {
    SecondOrderCone k;
    k.A = psd_sqrt(c.identity ? RMat(RMat::Identity(n, n)) : real_form(c.S));
    k.b = RVec::Zero(n);
    k.c = RVec::Zero(n);
    k.d = std::sqrt(c.bound);
    s.cones.push_back(k);
  }
  const SocpResult r = solve_socp(s);
  if (!r.report.ok()) return std::numeric_limits<double>::quiet_NaN();
  if (w_out) *w_out = complex_vec(r.x);
  return -r.report.objective;
}

// Three-level grid search over a 2-D box: step 1e-2, then 1e-4 and 1e-6
// around the incumbent. Independent of the solver under test.
template <class F, class Feasible>
inline double grid_max(F&& f, Feasible&& feasible, double u0, double u1, double v0, double v1) {
  double best = -1e300, bu = 0.5 * (u0 + u1), bv = 0.5 * (v0 + v1);
  double step = 1e-2;
  for (int level = 0; level < 3; ++level) {
    for (double u = u0; u <= u1; u += step)
      for (double v = v0; v <= v1; v += step) {
        if (!feasible(u, v)) continue;
        const double val = f(u, v);
        if (val > best) {
          best = val;
          bu = u;
          bv = v;
        }
      }
    u0 = bu - 2 * step;
    u1 = bu + 2 * step;
    v0 = bv - 2 * step;
    v1 = bv + 2 * step;
    step *= 1e-2;
  }
  return best;
}

struct QuadClass {
  const char* name;
  int constraints;
  bool nonneg;
};

inline QuadMaxProblem random_quad(const QuadClass& cls, CounterRng& rng) {
  const Index n = 2 + static_cast<Index>(rng.uniform() * 7);
  QuadMaxProblem p;
  p.nonneg = cls.nonneg;
  const Index rank = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(n));
  if (cls.nonneg) {
    p.x = random_cvec(rng, n, 4.0).real().cast<cd>();
    p.Y = random_psd(rng, n, rank).real().cast<cd>();
    QuadConstraint c;
    RVec t(n);
    for (Index i = 0; i < n; ++i) t(i) = 0.1 + rng.uniform();
    c.S = t.cast<cd>().asDiagonal();
    c.bound = 0.05 + rng.uniform();
    p.constraints.push_back(c);
    return p;
  }
  p.x = random_cvec(rng, n, 4.0);
  p.Y = random_psd(rng, n, rank);
  if (cls.constraints == 0) p.Y += 0.1 * CMat::Identity(n, n);
  if (cls.constraints >= 1) p.constraints.push_back(QuadConstraint::norm_ball(0.05 + rng.uniform()));
  if (cls.constraints == 2) {
    QuadConstraint c;
    c.S = random_psd(rng, n, 1 + static_cast<Index>(rng.uniform() * static_cast<double>(n)));
    c.bound = (0.01 + rng.uniform()) * c.S.trace().real() / static_cast<double>(n);
    p.constraints.push_back(c);
  }
  return p;
}

inline double box_kkt(const BoxQcqpProblem& p, const CVec& th, const RVec& mu, const RVec& nu) {
  CVec g = 2.0 * p.Upsilon.apply(th) + p.zeta;
  double scale = std::max(g.norm(), p.zeta.norm());
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    CVec gj = 2.0 * c.Lambda.apply(th);
    if (c.beta.size() > 0) gj += c.beta;
    g += mu(static_cast<Index>(j)) * gj;
  }
  for (Index m = 0; m < th.size(); ++m) g(m) += 2.0 * nu(m) * th(m);
  scale = std::max({scale, 1e-300, (2.0 * p.Upsilon.apply(th)).norm()});
  double r = g.norm() / scale;
  const double fscale = std::max(std::abs(p.objective(th)), 1e-300) + std::abs(p.Upsilon.quad(th));
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const double v = p.constraints[j].value(th);
    const double s = p.constraints[j].scale();
    r = std::max(r, std::max(0.0, v / s));
    r = std::max(r, std::max(0.0, -mu(static_cast<Index>(j))));
    r = std::max(r, std::abs(mu(static_cast<Index>(j)) * v) / fscale);
  }
  for (Index m = 0; m < th.size(); ++m) {
    r = std::max(r, std::max(0.0, std::norm(th(m)) - 1.0));
    r = std::max(r, std::abs(nu(m) * (1.0 - std::norm(th(m)))) / fscale);
  }
  return r;
}

inline BoxQcqpProblem random_box(CounterRng& rng, Index L, Index Q, int J) {
  BoxQcqpProblem p;
  const Index M = L * Q;
  p.Upsilon = BlockDiagonal::zeros(L, Q);
  for (Index l = 0; l < L; ++l)
    p.Upsilon[l] = random_psd(rng, Q, 1 + static_cast<Index>(rng.uniform() * static_cast<double>(Q))) +
                   (0.05 + rng.uniform()) * CMat::Identity(Q, Q);
  p.zeta = random_cvec(rng, M, 9.0);
  const CVec interior = oracle::random_in_disk(rng, M) * 0.7;
  for (int j = 0; j < J; ++j) {
    ConvexQuadConstraint c;
    c.Lambda = BlockDiagonal::zeros(L, Q);
    for (Index l = 0; l < L; ++l) c.Lambda[l] = random_psd(rng, Q, 1);
    if (rng.uniform() < 0.7) c.beta = random_cvec(rng, M, 1.0);
    c.c = 0.0;
    const double v = c.value(interior);
    c.c = -v - (0.05 + rng.uniform()) * (1.0 + std::abs(v));
    p.constraints.push_back(c);
  }
  return p;
}

// Conic route for a box QCQP, in the [Re; Im] layout.
inline double box_via_socp(const BoxQcqpProblem& p, CVec* out = nullptr) {
  const Index M = p.size(), n = 2 * M;
  SocpProblem s;
  s.P = real_form(p.Upsilon.dense());
  s.q = real_vec(p.zeta);
  s.G = RMat(0, n);
  s.h = RVec(0);
  for (const auto& c : p.constraints) {
    const RMat A = psd_sqrt(real_form(c.Lambda.dense()));
    const RVec br = c.beta.size() > 0 ? real_vec(c.beta) : RVec(RVec::Zero(n));
    SecondOrderCone k;
    k.A = RMat::Zero(n + 1, n);
    k.A.topRows(n) = 2.0 * A;
    k.A.row(n) = br.transpose();
    k.b = RVec::Zero(n + 1);
    k.b(n) = 1.0 + c.c;
    k.c = -br;
    k.d = 1.0 - c.c;
    s.cones.push_back(k);
  }
  for (Index m = 0; m < M; ++m) {
    SecondOrderCone k;
    k.A = RMat::Zero(2, n);
    k.A(0, m) = 1.0;
    k.A(1, M + m) = 1.0;
    k.b = RVec::Zero(2);
    k.c = RVec::Zero(n);
    k.d = 1.0;
    s.cones.push_back(k);
  }
  const SocpResult r = solve_socp(s);
  if (!r.report.ok()) return std::numeric_limits<double>::quiet_NaN();
  if (out) *out = complex_vec(r.x);
  return r.report.objective;
}

// Random strictly feasible SOCP with a positive definite quadratic term.
inline SocpProblem random_socp(CounterRng& rng) {
  const Index n = 2 + static_cast<Index>(rng.uniform() * 8);
  SocpProblem p;
  const RMat B = random_cmat(rng, n, n).real();
  p.P = B * B.transpose() / static_cast<double>(n) + 0.01 * RMat::Identity(n, n);
  p.q = random_cmat(rng, n, 1, 8.0).real();
  const RVec x0 = random_cmat(rng, n, 1).real();
  const int cones = 1 + static_cast<int>(rng.uniform() * 4);
  for (int i = 0; i < cones; ++i) {
    SecondOrderCone k;
    const Index rows = 1 + static_cast<Index>(rng.uniform() * 4);
    k.A = random_cmat(rng, rows, n).real();
    k.b = random_cmat(rng, rows, 1).real();
    k.c = random_cmat(rng, n, 1, 0.5).real();
    k.d = k.lhs(x0) - k.c.dot(x0) + 0.1 + rng.uniform();
    p.cones.push_back(k);
  }
  const Index lin = static_cast<Index>(rng.uniform() * 3);
  p.G = random_cmat(rng, lin, n).real();
  p.h = p.G * x0 + RVec::Constant(lin, 0.2);
  return p;
}

}  // namespace oracle

#endif  // SUBRIS_TESTS_ORACLE_SOLVER_ORACLE_HPP_
