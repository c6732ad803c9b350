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

// Dense reference constructions and random instance generators for tests.
// Everything here is deliberately naive: explicit M x M and M² x M²
// matrices built straight from the definitions.

#ifndef SUBRIS_TESTS_ORACLE_DENSE_ORACLE_HPP_
#define SUBRIS_TESTS_ORACLE_DENSE_ORACLE_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "subris/channel.hpp"
#include "subris/model.hpp"
#include "subris/types.hpp"

namespace oracle {

using namespace subris;

inline cd cnormal(CounterRng& rng, double var = 1.0) {
  const double s = std::sqrt(var / 2.0);
  return {s * rng.normal(), s * rng.normal()};
}

inline CVec random_cvec(CounterRng& rng, Index n, double var = 1.0) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cnormal(rng, var);
  return v;
}

inline CMat random_cmat(CounterRng& rng, Index r, Index c, double var = 1.0) {
  CMat m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = cnormal(rng, var);
  return m;
}

inline CVec random_phases(CounterRng& rng, Index n) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
  return v;
}

/// Random point of the closed unit polydisc.
inline CVec random_in_disk(CounterRng& rng, Index n) {
  CVec v(n);
  for (Index i = 0; i < n; ++i)
    v(i) = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
  return v;
}

inline CMat random_psd(CounterRng& rng, Index n, Index rank) {
  const CMat B = random_cmat(rng, n, rank);
  return B * B.adjoint();
}

struct Instance {
  SystemDims dims;
  SystemParams params;
  ChannelSet ch;
  RisState state;
  Precoder w;
};

/// Well-conditioned unit-variance instance (no path loss), for algebraic
/// identities where the physical scale only hurts round-off.
inline Instance random_instance(std::uint64_t seed, int N, int K, int M, int L) {
  CounterRng rng(seed);
  Instance in;
  in.dims = SystemDims{N, K, M, L};
  in.ch.h_d = random_cmat(rng, N, K);
  in.ch.G = random_cmat(rng, M, N, 0.5);
  in.ch.h_r = random_cmat(rng, M, K, 0.5);
  in.state.theta = random_phases(rng, M);
  in.state.a = RVec(L);
  for (Index l = 0; l < L; ++l) in.state.a(l) = 0.3 + rng.uniform();
  in.w.W = random_cmat(rng, N, K, 0.25);
  in.params.sigma_sq = RVec(K);
  for (Index k = 0; k < K; ++k) in.params.sigma_sq(k) = 0.05 + 0.5 * rng.uniform();
  in.params.sigma_z_sq = 0.02 + 0.2 * rng.uniform();
  in.params.P_BS = 1.0 + rng.uniform();
  in.params.W_PS = in.params.W_PA = 1e-3;
  in.params.P_RIS_tot = in.params.static_ris_power(in.dims) + 50.0 * (1.0 + rng.uniform());
  in.params.Gamma = RVec::Constant(K, 1.0);
  return in;
}

/// Ξ = Q^{-1/2} Eᵀ diag(a) E, materialized.
inline CMat dense_xi(const RVec& a, Index M) {
  const Index L = a.size(), Q = M / L;
  CMat X = CMat::Zero(M, M);
  for (Index l = 0; l < L; ++l)
    X.block(l * Q, l * Q, Q, Q).setConstant(cd(a(l) / std::sqrt(static_cast<double>(Q)), 0.0));
  return X;
}

/// Ψ = diag(θ) Ξ diag(θ), materialized.
inline CMat dense_psi(const RisState& s) {
  const CMat X = dense_xi(s.a, s.theta.size());
  return s.theta.asDiagonal() * X * s.theta.asDiagonal();
}

inline RVec dense_sinr(const ChannelSet& ch, const CMat& Psi, const CMat& W, const RVec& sigma_sq,
                       double sigma_z_sq) {
  const Index K = W.cols();
  RVec out(K);
  for (Index k = 0; k < K; ++k) {
    const CVec hH = ch.h_d.col(k).adjoint() + ch.h_r.col(k).adjoint() * Psi * ch.G;  // row as column
    const CVec hrPsi = (ch.h_r.col(k).adjoint() * Psi).transpose();
    double num = 0.0, den = hrPsi.squaredNorm() * sigma_z_sq + sigma_sq(k);
    for (Index i = 0; i < K; ++i) {
      const double p = std::norm((hH.transpose() * W.col(i))(0));
      if (i == k)
        num = p;
      else
        den += p;
    }
    out(k) = num / den;
  }
  return out;
}

/// P̃_{k,i} = diag(h_r,k) Ξ diag(g_i*) with g_i = G w_i, materialized, so that
/// h_r,kᴴ Ψ g_i = θᵀ conj(P̃_{k,i}) θ.
inline CMat dense_ptilde(const ChannelSet& ch, const RVec& a, const CMat& W, Index k, Index i) {
  const Index M = ch.G.rows();
  const CVec g = ch.G * W.col(i);
  return CMat(ch.h_r.col(k).asDiagonal()) * dense_xi(a, M) * CMat(g.conjugate().asDiagonal());
}

/// vec(θθᵀ), column-major.
inline CVec lift(const CVec& theta) {
  const CMat V = theta * theta.transpose();
  return Eigen::Map<const CVec>(V.data(), V.size());
}

/// f_{k,i} ∈ C^{M²} with f_{k,i}ᴴ v = h_r,kᴴ Ψ g_i for v = vec(θθᵀ).
inline CVec dense_f(const ChannelSet& ch, const RVec& a, const CMat& W, Index k, Index i) {
  const CMat Pt = dense_ptilde(ch, a, W, k, i);
  // θᵀ conj(P̃) θ = vec(θθᵀ)ᵀ vec(conj(P̃)) ⇒ f = vec(P̃).
  return Eigen::Map<const CVec>(Pt.data(), Pt.size());
}

/// F = Σ_k |η_k|² Σ_i f_{k,i} f_{k,i}ᴴ, the explicit M² x M² matrix.
inline CMat dense_F(const ChannelSet& ch, const RVec& a, const CMat& W, const RVec& eta_sq) {
  const Index M = ch.G.rows(), K = W.cols();
  CMat F = CMat::Zero(M * M, M * M);
  for (Index k = 0; k < K; ++k)
    for (Index i = 0; i < K; ++i) {
      const CVec f = dense_f(ch, a, W, k, i);
      F += eta_sq(k) * f * f.adjoint();
    }
  return F;
}

/// Real 2n x 2n matrix of the form x ↦ Re{θᵀ S θ} over x = [Re θ; Im θ]
/// (block ordering, independent of the solver's interleaved layout).
inline RMat realified_symmetric(const CMat& P) {
  const CMat S = P + P.transpose();
  const Index n = S.rows();
  RMat R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = S.real();
  R.topRightCorner(n, n) = -S.imag();
  R.bottomLeftCorner(n, n) = -S.imag();
  R.bottomRightCorner(n, n) = -S.real();
  return R;
}

}  // namespace oracle

#endif  // SUBRIS_TESTS_ORACLE_DENSE_ORACLE_HPP_
