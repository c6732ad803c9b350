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

#ifndef SUBRIS_SOLVERS_RCG_HPP_
#define SUBRIS_SOLVERS_RCG_HPP_

#include <cmath>

#include "subris/solvers/common.hpp"
#include "subris/types.hpp"

namespace subris {

struct RcgOptions {
  double grad_tol = 1e-8;  // relative to the Euclidean gradient scale
  int max_iter = 500;
  double armijo = 1e-4;
};

struct RcgResult {
  CVec psi;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
};

/// ψᴴMψ + Re{ψᴴm}.
inline double rcg_objective(const CMat& M, const CVec& m, const CVec& psi) {
  return psi.dot(M * psi).real() + psi.dot(m).real();
}

namespace detail {

inline CVec tangent_project(const CVec& z, const CVec& psi) {
  return z - (z.array() * psi.conjugate().array()).real().cast<cd>().cwiseProduct(psi.array()).matrix();
}

inline CVec unit_normalize(const CVec& z) {
  CVec out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z(i));
    out(i) = a > 0 ? z(i) / a : cd(1.0, 0.0);
  }
  return out;
}

}  // namespace detail

/// Maximizes ψᴴMψ + Re{ψᴴm} over |ψ_i| = 1 with Riemannian conjugate
/// gradients: tangent-space projection of the Euclidean gradient 2Mψ + m,
/// Polak-Ribière directions with projection transport, entrywise
/// normalization as retraction, and Armijo backtracking.
inline RcgResult rcg_unit_modulus(const CMat& M, const CVec& m, const CVec& psi0,
                                  const RcgOptions& opts = {}) {
  const Index n = m.size();
  require(M.rows() == n && M.cols() == n && psi0.size() == n, "rcg_unit_modulus: size mismatch");
  RcgResult res;
  CVec psi = detail::unit_normalize(psi0);
  double f = rcg_objective(M, m, psi);
  const double gscale = std::max(2.0 * M.cwiseAbs().rowwise().sum().maxCoeff() + m.cwiseAbs().maxCoeff(), 1e-300) *
                        std::sqrt(static_cast<double>(std::max<Index>(n, 1)));
  CVec grad = detail::tangent_project(2.0 * M * psi + m, psi);
  CVec dir = grad;
  double step = 1.0 / std::max(2.0 * M.cwiseAbs().rowwise().sum().maxCoeff() + m.cwiseAbs().maxCoeff(), 1e-300);
  res.status = SolveStatus::MaxIter;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    if (grad.norm() <= opts.grad_tol * gscale) {
      res.status = SolveStatus::Optimal;
      break;
    }
    double slope = grad.dot(dir).real();
    if (slope <= 0) {
      dir = grad;
      slope = grad.squaredNorm();
    }
    double alpha = step * 2.0;
    CVec next;
    double fn = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = detail::unit_normalize(psi + alpha * dir);
      fn = rcg_objective(M, m, next);
      if (fn >= f + opts.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (dir.dot(grad).real() < grad.squaredNorm() * (1 - 1e-12)) {
        dir = grad;  // restart along the gradient
        continue;
      }
      res.status = SolveStatus::Optimal;  // no ascent possible at working precision
      break;
    }
    step = alpha;
    const CVec grad_new = detail::tangent_project(2.0 * M * next + m, next);
    const CVec grad_old_t = detail::tangent_project(grad, next);
    const CVec dir_t = detail::tangent_project(dir, next);
    const double beta = std::max(0.0, grad_new.dot(grad_new - grad_old_t).real() /
                                          std::max(grad.squaredNorm(), 1e-300));
    dir = grad_new + beta * dir_t;
    psi = next;
    f = fn;
    grad = grad_new;
  }
  res.psi = psi;
  res.value = f;
  res.grad_norm = grad.norm();
  return res;
}

}  // namespace subris

#endif  // SUBRIS_SOLVERS_RCG_HPP_
