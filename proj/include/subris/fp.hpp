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

#ifndef SUBRIS_FP_HPP_
#define SUBRIS_FP_HPP_

#include <cmath>
#include <numbers>
#include <vector>

#include "subris/model.hpp"
#include "subris/solvers/quad_max.hpp"
#include "subris/types.hpp"

namespace subris {

/// Auxiliaries of the Lagrangian-dual (μ) and quadratic (η) transforms.
struct FpAux {
  RVec mu;
  CVec eta;
};

/// μ_k* equals the SINR of user k.
inline RVec update_mu(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                      const SystemParams& params) {
  return sinr_all(ch, op, w, params);
}

/// η_k* = √(1+μ_k) h_kᴴw_k / (Σ_i |h_kᴴw_i|² + ‖h_r,kᴴΨ‖²σ_z² + σ_k²); zero
/// when the denominator vanishes.
inline CVec update_eta(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                       const FpAux& aux, const SystemParams& params) {
  const CMat H = composite_channels(ch, op);
  const CMat gains = H.adjoint() * w.W;
  CVec eta(H.cols());
  for (Index k = 0; k < H.cols(); ++k) {
    const double den = gains.row(k).squaredNorm() + effective_noise(k, ch, op, params);
    eta(k) = den > 0 ? std::sqrt(1.0 + aux.mu(k)) * gains(k, k) / den : cd(0.0, 0.0);
  }
  return eta;
}

/// The transformed objective in natural-log units:
/// Σ_k ln(1+μ_k) − μ_k + 2√(1+μ_k) Re{η_k* h_kᴴw_k} − |η_k|² D_k.
inline double f2_objective_nats(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                                const FpAux& aux, const SystemParams& params) {
  const CMat H = composite_channels(ch, op);
  const CMat gains = H.adjoint() * w.W;
  double f = 0.0;
  for (Index k = 0; k < H.cols(); ++k) {
    const double mu = aux.mu(k);
    const double den = gains.row(k).squaredNorm() + effective_noise(k, ch, op, params);
    f += std::log1p(mu) - mu + 2.0 * std::sqrt(1.0 + mu) * (std::conj(aux.eta(k)) * gains(k, k)).real() -
         std::norm(aux.eta(k)) * den;
  }
  return f;
}

/// f2 in bits: the natural-log form divided by ln 2, so that μ* = γ and η*
/// maximize it exactly and it coincides with Σ log2(1+γ_k) at (μ*, η*).
inline double f2_objective(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                           const FpAux& aux, const SystemParams& params) {
  return f2_objective_nats(ch, op, w, aux, params) / std::numbers::ln2;
}

inline FpAux refresh_aux(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                         const SystemParams& params) {
  FpAux aux;
  aux.mu = update_mu(ch, op, w, params);
  aux.eta = update_eta(ch, op, w, aux, params);
  return aux;
}

/// Precoder subproblem: maximize Re{xᴴw} − wᴴYw over the stacked precoder,
/// with ‖w‖² ≤ P_BS and, unless disabled, wᴴZw ≤ P_RIS − ‖Ψ‖_F²σ_z².
/// The objective equals ln2 · f2 up to a w-independent constant. A
/// negative second bound marks an infeasible RIS budget.
inline QuadMaxProblem assemble_w_problem(const ChannelSet& ch, const ReflectionOperator& op,
                                         const FpAux& aux, const SystemParams& params,
                                         const SystemDims& dims, bool ris_constraint = true) {
  const Index N = ch.h_d.rows();
  const Index K = ch.h_d.cols();
  const CMat H = composite_channels(ch, op);
  CMat A = CMat::Zero(N, N);
  for (Index k = 0; k < K; ++k) A += std::norm(aux.eta(k)) * H.col(k) * H.col(k).adjoint();
  QuadMaxProblem p;
  p.x.resize(N * K);
  p.Y = CMat::Zero(N * K, N * K);
  for (Index k = 0; k < K; ++k) {
    p.x.segment(k * N, N) = 2.0 * std::sqrt(1.0 + aux.mu(k)) * aux.eta(k) * H.col(k);
    p.Y.block(k * N, k * N, N, N) = A;
  }
  p.constraints.push_back(QuadConstraint::norm_ball(params.P_BS));
  if (ris_constraint) {
    const CMat PsiG = op.apply(ch.G);
    const CMat B = PsiG.adjoint() * PsiG;
    QuadConstraint c;
    c.S = CMat::Zero(N * K, N * K);
    for (Index k = 0; k < K; ++k) c.S.block(k * N, k * N, N, N) = B;
    c.bound = params.available_ris_power(dims) - op.frobenius_sq() * params.sigma_z_sq;
    p.constraints.push_back(std::move(c));
  }
  return p;
}

/// Per-sub-array cascade quantities for a fixed θ, shared by the
/// amplification subproblems of both algorithms. With Φ_l = θ̃_l θ̃_lᵀ:
/// b_{k,i}(l) = Q^{-1/2} g_{i,l}ᴴ Φ_lᴴ h_{r,k,l}, so that h_r,kᴴΨ g_i = b_{k,i}ᴴ a.
struct AmplifierTerms {
  Index K = 0;
  Index L = 0;
  std::vector<CVec> b;  // b[k*K + i], length L
  RMat s;               // s(l, k): per-user RIS-noise weights
  RVec t;               // reflect-power weights, aᵀ diag(t) a = RIS output power
  CMat direct;          // direct(k, i) = h_d,kᴴ w_i

  const CVec& b_at(Index k, Index i) const { return b[static_cast<std::size_t>(k * K + i)]; }
};

inline AmplifierTerms build_amplifier_terms(const ChannelSet& ch, const CVec& theta, const Precoder& w,
                                            const SystemParams& params, const SystemDims& dims) {
  dims.validate();
  require(theta.size() == dims.M, "build_amplifier_terms: theta must have M entries");
  const Index K = dims.K, L = dims.L, Q = dims.Q();
  const double inv_q = 1.0 / static_cast<double>(Q);
  const double inv_sqrt_q = 1.0 / std::sqrt(static_cast<double>(Q));
  const CMat g = ch.G * w.W;  // column i is g_i
  CMat hr_theta(K, L), theta_g(K, L);
  RVec tn2(L);
  for (Index l = 0; l < L; ++l) {
    auto th = theta.segment(l * Q, Q);
    tn2(l) = th.squaredNorm();
    for (Index k = 0; k < K; ++k) {
      hr_theta(k, l) = ch.h_r.col(k).segment(l * Q, Q).dot(th);  // h_{r,k,l}ᴴ θ̃_l
      theta_g(k, l) = (th.transpose() * g.col(k).segment(l * Q, Q))(0);  // θ̃_lᵀ g_{k,l}
    }
  }
  AmplifierTerms at;
  at.K = K;
  at.L = L;
  at.b.resize(static_cast<std::size_t>(K * K));
  for (Index k = 0; k < K; ++k)
    for (Index i = 0; i < K; ++i) {
      CVec bki(L);
      for (Index l = 0; l < L; ++l) bki(l) = inv_sqrt_q * std::conj(hr_theta(k, l) * theta_g(i, l));
      at.b[static_cast<std::size_t>(k * K + i)] = std::move(bki);
    }
  at.s.resize(L, K);
  at.t = RVec::Zero(L);
  for (Index l = 0; l < L; ++l) {
    for (Index k = 0; k < K; ++k) {
      at.s(l, k) = inv_q * std::norm(hr_theta(k, l)) * tn2(l) * params.sigma_z_sq;
      at.t(l) += inv_q * tn2(l) * std::norm(theta_g(k, l));
    }
    at.t(l) += inv_q * tn2(l) * tn2(l) * params.sigma_z_sq;
  }
  at.direct = ch.h_d.adjoint() * w.W;
  return at;
}

/// Amplification subproblem: maximize Re{dᴴa} − aᴴRa s.t. aᴴTa ≤ P_RIS and
/// a ≥ 0, equal to ln2 · f2 up to an a-independent constant.
inline QuadMaxProblem assemble_a_problem(const ChannelSet& ch, const CVec& theta, const Precoder& w,
                                         const FpAux& aux, const SystemParams& params,
                                         const SystemDims& dims) {
  const AmplifierTerms at = build_amplifier_terms(ch, theta, w, params, dims);
  const Index K = dims.K, L = dims.L;
  QuadMaxProblem p;
  p.nonneg = true;
  p.x = CVec::Zero(L);
  p.Y = CMat::Zero(L, L);
  for (Index k = 0; k < K; ++k) {
    const double e2 = std::norm(aux.eta(k));
    p.x += 2.0 * std::sqrt(1.0 + aux.mu(k)) * aux.eta(k) * at.b_at(k, k);
    for (Index i = 0; i < K; ++i) {
      const CVec& bki = at.b_at(k, i);
      p.x -= e2 * 2.0 * at.direct(k, i) * bki;  // c_{k,i}
      p.Y += e2 * bki * bki.adjoint();
    }
    p.Y.diagonal() += (e2 * at.s.col(k)).cast<cd>();
  }
  QuadConstraint c;
  c.S = at.t.cast<cd>().asDiagonal();
  c.bound = params.available_ris_power(dims);
  p.constraints.push_back(std::move(c));
  return p;
}

}  // namespace subris

#endif  // SUBRIS_FP_HPP_
