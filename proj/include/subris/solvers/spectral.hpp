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

#ifndef SUBRIS_SOLVERS_SPECTRAL_HPP_
#define SUBRIS_SOLVERS_SPECTRAL_HPP_

#include <cmath>

#include "subris/types.hpp"

namespace subris {

struct SpectralOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

struct SpectralEstimate {
  double value = 0.0;  // estimate of the largest singular value
  bool converged = false;
  int iterations = 0;
  CVec vector;  // dominant right singular vector, reusable as a warm start
};

/// Largest singular value of S by power iteration on SᴴS.
///
/// `apply` computes S x and `apply_adjoint` computes Sᴴ y. On convergence
/// the value is lifted by the Rayleigh residual so that it errs upward;
/// otherwise `fallback` (an upper bound such as ‖S‖_F) is returned.
template <class Apply, class ApplyAdjoint>
SpectralEstimate top_singular_value(Apply&& apply, ApplyAdjoint&& apply_adjoint, Index n,
                                    double fallback, const SpectralOptions& opts = {},
                                    const CVec* warm = nullptr) {
  SpectralEstimate est;
  CVec v;
  if (warm != nullptr && warm->size() == n && warm->norm() > 0) {
    v = *warm;
  } else {
    v = CVec(n);
    for (Index i = 0; i < n; ++i) v(i) = cd(1.0 + 0.1 * static_cast<double>(i % 7), 0.05 * static_cast<double>(i % 3));
  }
  v.normalize();
  double rho_prev = -1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    ++est.iterations;
    CVec y = apply_adjoint(apply(v));
    const double rho = v.dot(y).real();
    const double ny = y.norm();
    if (!(ny > 0) || !std::isfinite(ny)) {
      est.value = 0.0;
      est.converged = std::isfinite(ny);
      est.vector = v;
      return est;
    }
    if (rho_prev >= 0 && std::abs(rho - rho_prev) <= opts.tol * rho) {
      const double resid = (y - rho * v).norm();
      est.value = std::sqrt(rho + resid);
      est.converged = true;
      est.vector = y / ny;
      return est;
    }
    rho_prev = rho;
    v = y / ny;
  }
  est.value = fallback;
  est.converged = false;
  est.vector = v;
  return est;
}

}  // namespace subris

#endif  // SUBRIS_SOLVERS_SPECTRAL_HPP_
