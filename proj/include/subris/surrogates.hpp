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

#ifndef SUBRIS_SURROGATES_HPP_
#define SUBRIS_SURROGATES_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "subris/fp.hpp"
#include "subris/model.hpp"
#include "subris/solvers/box_qcqp.hpp"
#include "subris/solvers/spectral.hpp"
#include "subris/types.hpp"

namespace subris {

/// Cascade coupling between θ and the received signals for fixed a and W.
///
/// f_{k,i}(θ) = h_r,kᴴ Ψ g_i with g_i = G w_i is the quadratic form θᵀ A_{k,i} θ,
/// where A_{k,i} is block diagonal with rank-one blocks
/// ξ_l conj(h_{r,k,l}) g_{i,l}ᵀ. Sums Σ C_{k,i} A_{k,i} are formed per block as
/// ξ_l conj(H_l) C G_lᵀ without touching the individual A_{k,i}.
class ThetaCoupling {
 public:
  ThetaCoupling(const ChannelSet& ch, const RVec& a, const Precoder& w, const SystemDims& dims)
      : L_(dims.L), Q_(dims.Q()), h_r_(ch.h_r), g_(ch.G * w.W), direct_(ch.h_d.adjoint() * w.W) {
    dims.validate();
    require(a.size() == dims.L, "ThetaCoupling: a must have L entries");
    xi_ = a / std::sqrt(static_cast<double>(Q_));
  }

  Index M() const { return h_r_.rows(); }
  Index K() const { return h_r_.cols(); }
  Index L() const { return L_; }
  Index Q() const { return Q_; }
  const RVec& xi() const { return xi_; }
  const CMat& h_r() const { return h_r_; }
  const CMat& g() const { return g_; }
  /// (k, i) = h_d,kᴴ w_i.
  const CMat& direct() const { return direct_; }

  /// (k, i) = f_{k,i}(θ).
  CMat cascade(const CVec& theta) const {
    const Index K = this->K();
    CMat hr_theta(K, L_), theta_g(K, L_);
    for (Index l = 0; l < L_; ++l) {
      auto th = theta.segment(l * Q_, Q_);
      for (Index k = 0; k < K; ++k) {
        hr_theta(k, l) = xi_(l) * h_r_.col(k).segment(l * Q_, Q_).dot(th);
        theta_g(k, l) = (th.transpose() * g_.col(k).segment(l * Q_, Q_))(0);
      }
    }
    return hr_theta * theta_g.transpose();
  }

  /// Σ_{k,i} C(k, i) A_{k,i}.
  BlockDiagonal combine(const CMat& C) const {
    BlockDiagonal out = BlockDiagonal::zeros(L_, Q_);
    for (Index l = 0; l < L_; ++l) {
      const CMat Hl = h_r_.middleRows(l * Q_, Q_).conjugate();
      const CMat Gl = g_.middleRows(l * Q_, Q_);
      out[l] = xi_(l) * (Hl * C * Gl.transpose());
    }
    return out;
  }

  /// (k, i) = ‖A_{k,i}‖_F² = Σ_l ξ_l² ‖h_{r,k,l}‖² ‖g_{i,l}‖².
  RMat frobenius_sq() const {
    const Index K = this->K();
    RMat hn(K, L_), gn(K, L_);
    for (Index l = 0; l < L_; ++l)
      for (Index k = 0; k < K; ++k) {
        hn(k, l) = xi_(l) * xi_(l) * h_r_.col(k).segment(l * Q_, Q_).squaredNorm();
        gn(k, l) = g_.col(k).segment(l * Q_, Q_).squaredNorm();
      }
    return hn * gn.transpose();
  }

  /// Block l = a_l² Σ_k w_k |h_{r,k,l}⟩⟨h_{r,k,l}|: the RIS-noise term seen by
  /// the users, weighted per user.
  BlockDiagonal noise_form(const RVec& weight, double sigma_z_sq) const {
    BlockDiagonal out = BlockDiagonal::zeros(L_, Q_);
    const double q = static_cast<double>(Q_);
    for (Index l = 0; l < L_; ++l) {
      const CMat Hl = h_r_.middleRows(l * Q_, Q_);
      out[l] = (q * xi_(l) * xi_(l) * sigma_z_sq) * (Hl * weight.cast<cd>().asDiagonal() * Hl.adjoint());
    }
    return out;
  }

  /// Block l = a_l² Σ_k conj(g_{k,l}) g_{k,l}ᵀ, so θᴴ(·)θ = Σ_k ‖ΨG w_k‖² at unit modulus.
  BlockDiagonal reflect_form() const {
    BlockDiagonal out = BlockDiagonal::zeros(L_, Q_);
    const double q = static_cast<double>(Q_);
    for (Index l = 0; l < L_; ++l) {
      const CMat Gl = g_.middleRows(l * Q_, Q_).conjugate();
      out[l] = (q * xi_(l) * xi_(l)) * (Gl * Gl.adjoint());
    }
    return out;
  }

 private:
  Index L_;
  Index Q_;
  RVec xi_;
  CMat h_r_;
  CMat g_;
  CMat direct_;
};

/// Quartic majorizer at θ_t: Re{θᵀ F_t θ} + c, valid on the unit-modulus set
/// and tight at θ_t.
struct QuarticSurrogate {
  BlockPlusRankOne Ft;
  double lambda = 0.0;
  double c = 0.0;

  double value(const CVec& theta) const {
    return (theta.transpose() * Ft.apply(theta))(0).real() + c;
  }
};

/// Isotropic majorizer of Re{θᵀ P θ} at θ_t:
/// λ/2 ‖θ‖² + Re{θᴴ u} + c, valid everywhere and tight at θ_t.
struct IsotropicMajorizer {
  double lambda = 0.0;
  CVec u;
  double c = 0.0;
  bool spectral_converged = true;

  double value(const CVec& theta) const {
    return 0.5 * lambda * theta.squaredNorm() + theta.dot(u).real() + c;
  }
};

struct MajorizerOptions {
  /// Up to this many elements σ_max is computed by a dense eigensolver;
  /// above it, by warm-started power iteration.
  Index dense_limit = 32;
  SpectralOptions spectral{};
};

namespace detail {

/// Builds quartic coefficients from per-pair weights: F_t = Σ C_{k,i} A_{k,i}
/// − 2λ θ_t* θ_tᴴ with C = 2 W ∘ conj(f(θ_t)), and c = λ M² + λ ‖θ_t‖⁴ − Σ W |f(θ_t)|².
inline QuarticSurrogate quartic_from_weights(const ThetaCoupling& cp, const RMat& weight,
                                             const CVec& theta_t, double lambda) {
  const CMat f = cp.cascade(theta_t);
  const CMat C = 2.0 * weight.cast<cd>().cwiseProduct(f.conjugate());
  QuarticSurrogate s;
  s.lambda = lambda;
  s.Ft.base = cp.combine(C);
  s.Ft.coef = cd(-2.0 * lambda, 0.0);
  s.Ft.u = theta_t.conjugate();
  const double m = static_cast<double>(cp.M());
  const double n2 = theta_t.squaredNorm();
  double vfv = 0.0;
  for (Index k = 0; k < f.rows(); ++k)
    for (Index i = 0; i < f.cols(); ++i) vfv += weight(k, i) * std::norm(f(k, i));
  s.c = lambda * m * m + lambda * n2 * n2 - vfv;
  return s;
}

}  // namespace detail

/// σ_max(P + Pᵀ) bounds the real quadratic form Re{θᵀPθ} through the isotropic
/// majorizer. `warm` carries the dominant direction between calls.
inline IsotropicMajorizer realify_and_majorize(const BlockPlusRankOne& P, const CVec& theta_t,
                                               const MajorizerOptions& opts = {},
                                               CVec* warm = nullptr) {
  BlockPlusRankOne S;
  S.base = P.base + P.base.transpose();
  S.coef = 2.0 * P.coef;
  S.u = P.u;
  const Index n = S.size();
  double lambda = 0.0;
  IsotropicMajorizer out;
  if (n <= opts.dense_limit) {
    const CMat Sd = S.dense();
    Eigen::SelfAdjointEigenSolver<CMat> es(Sd.adjoint() * Sd, Eigen::EigenvaluesOnly);
    lambda = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0)) * (1.0 + 1e-12);
  } else {
    const double fallback =
        std::sqrt(S.base.frobenius_sq()) + 2.0 * std::abs(P.coef) * P.u.squaredNorm();
    auto apply = [&](const CVec& x) { return S.apply(x); };
    auto apply_adj = [&](const CVec& y) { return CVec(S.apply(CVec(y.conjugate())).conjugate()); };
    const SpectralEstimate est = top_singular_value(apply, apply_adj, n, fallback, opts.spectral, warm);
    lambda = est.value;
    out.spectral_converged = est.converged;
    if (warm != nullptr) *warm = est.vector;
  }
  out.lambda = lambda;
  // Re{θᵀSθ_t} = Re{θᴴ conj(Sθ_t)}.
  out.u = S.apply(theta_t).conjugate() - lambda * theta_t;
  out.c = 0.5 * lambda * theta_t.squaredNorm() - (theta_t.transpose() * P.apply(theta_t))(0).real();
  return out;
}

/// θ-subproblem data of the rate maximization for fixed (μ, η, W, a).
///
/// Up to constants, −ln2 · f2 as a function of θ on the unit-modulus set is
/// Σ_k |η_k|² Σ_i |d_{k,i} + f_{k,i}|² − 2√(1+μ_k) Re{η_k* (d_{k,k} + f_{k,k})} + θᴴ Q1 θ
/// with d_{k,i} = h_d,kᴴ w_i. The RIS budget reads θᴴ Q2 θ ≤ τ.
struct SumRateThetaData {
  ThetaCoupling cp;
  RVec eta_sq;     // |η_k|²
  CVec lin;        // 2√(1+μ_k) η_k*
  BlockDiagonal B;  // linear-in-f terms: Re{θᵀBθ}
  BlockDiagonal Q1;
  BlockDiagonal Q2;
  double tau = 0.0;
  double lambda_f = 0.0;
  RMat weight;  // weight(k, i) = |η_k|²

  /// The exact θ-objective (to be minimized), evaluated with the quadratic
  /// RIS-noise form.
  double objective(const CVec& theta) const {
    const CMat f = cp.cascade(theta);
    const CMat& d = cp.direct();
    double v = Q1.quad(theta);
    for (Index k = 0; k < f.rows(); ++k) {
      for (Index i = 0; i < f.cols(); ++i) v += eta_sq(k) * std::norm(d(k, i) + f(k, i));
      v -= (lin(k) * (d(k, k) + f(k, k))).real();
    }
    return v;
  }
};

inline SumRateThetaData build_sumrate_theta_data(const ChannelSet& ch, const RVec& a, const Precoder& w,
                                                 const FpAux& aux, const SystemParams& params,
                                                 const SystemDims& dims) {
  SumRateThetaData d{ThetaCoupling(ch, a, w, dims), {}, {}, {}, {}, {}, 0.0, 0.0, {}};
  const Index K = dims.K;
  d.eta_sq = aux.eta.cwiseAbs2();
  d.lin.resize(K);
  for (Index k = 0; k < K; ++k) d.lin(k) = 2.0 * std::sqrt(1.0 + aux.mu(k)) * std::conj(aux.eta(k));
  d.weight = d.eta_sq.replicate(1, K);
  CMat C = 2.0 * d.weight.cast<cd>().cwiseProduct(d.cp.direct().conjugate());
  C.diagonal() -= d.lin;
  d.B = d.cp.combine(C);
  d.Q1 = d.cp.noise_form(d.eta_sq, params.sigma_z_sq);
  d.Q2 = d.cp.reflect_form();
  d.tau = params.available_ris_power(dims) -
          static_cast<double>(dims.Q()) * a.squaredNorm() * params.sigma_z_sq;
  d.lambda_f = d.weight.cwiseProduct(d.cp.frobenius_sq()).sum();
  return d;
}

/// Quartic majorizer of Σ_k |η_k|² Σ_i |f_{k,i}|² at θ_t with λ_f = tr(F).
inline QuarticSurrogate surrogate_quartic(const SumRateThetaData& d, const CVec& theta_t) {
  return detail::quartic_from_weights(d.cp, d.weight, theta_t, d.lambda_f);
}

/// One ADMM θ-step as a convex problem over |θ_m| ≤ 1: minimize
/// θᴴΥθ + Re{θᴴζ} s.t. θᴴQ2θ ≤ τ. `constant` restores the surrogate value.
struct ThetaQp {
  BoxQcqpProblem qp;
  double constant = 0.0;
  bool spectral_converged = true;
};

inline ThetaQp build_theta_qp(const SumRateThetaData& d, const CVec& theta_t, const CVec& vartheta,
                              const CVec& omega, double rho, const MajorizerOptions& opts = {},
                              CVec* warm = nullptr) {
  const QuarticSurrogate qs = surrogate_quartic(d, theta_t);
  BlockPlusRankOne Pt = qs.Ft;
  Pt.base += d.B;
  const IsotropicMajorizer mj = realify_and_majorize(Pt, theta_t, opts, warm);
  ThetaQp out;
  out.qp.Upsilon = d.Q1;
  out.qp.Upsilon.add_identity(0.5 * (mj.lambda + rho));
  out.qp.zeta = mj.u - rho * vartheta + omega;
  ConvexQuadConstraint budget;
  budget.Lambda = d.Q2;
  budget.c = -d.tau;
  out.qp.constraints.push_back(std::move(budget));
  out.constant = qs.c + mj.c + 0.5 * rho * (vartheta - omega / rho).squaredNorm();
  out.spectral_converged = mj.spectral_converged;
  return out;
}

/// θ-subproblem data of the power minimization for fixed (W, a).
///
/// SINR constraint k on the unit-modulus set:
/// Γ_k Σ_{i≠k} |d_{k,i} + f_{k,i}|² − |d_{k,k} + f_{k,k}|² + θᴴ Q̂_k θ + ς_k ≤ 0.
struct PmThetaData {
  ThetaCoupling cp;
  RVec Gamma;
  RVec sigma_sq;
  std::vector<RMat> weight;          // weight[k](k, i): Γ_k for i ≠ k, −1 for i = k
  std::vector<BlockDiagonal> B;      // linear-in-f terms per user
  std::vector<BlockDiagonal> Qhat;   // RIS-noise forms per user
  RVec varsigma;
  RVec lambda;                       // λ_k = Γ_k Σ_{i≠k} ‖A_{k,i}‖² + ‖A_{k,k}‖²
  BlockDiagonal Q2;

  /// Constraint k evaluated exactly (negative when the SINR exceeds Γ_k on
  /// the unit-modulus set).
  double constraint(Index k, const CVec& theta) const {
    const CMat f = cp.cascade(theta);
    const CMat& d = cp.direct();
    double v = Qhat[static_cast<std::size_t>(k)].quad(theta) + Gamma(k) * sigma_sq(k);
    for (Index i = 0; i < f.cols(); ++i) {
      const double p = std::norm(d(k, i) + f(k, i));
      v += i == k ? -p : Gamma(k) * p;
    }
    return v;
  }

  /// Σ_k ‖ΨGw_k‖² at unit modulus.
  double objective(const CVec& theta) const { return Q2.quad(theta); }
};

inline PmThetaData build_pm_constraint_data(const ChannelSet& ch, const RVec& a, const Precoder& w,
                                            const SystemParams& params, const SystemDims& dims) {
  require(params.Gamma.size() == dims.K, "build_pm_constraint_data: Gamma must have K entries");
  PmThetaData d{ThetaCoupling(ch, a, w, dims), params.Gamma, params.sigma_sq, {}, {}, {}, {}, {}, {}};
  const Index K = dims.K;
  const CMat& dir = d.cp.direct();
  const RMat fro = d.cp.frobenius_sq();
  d.varsigma.resize(K);
  d.lambda.resize(K);
  for (Index k = 0; k < K; ++k) {
    RMat wk = RMat::Zero(K, K);
    wk.row(k).setConstant(d.Gamma(k));
    wk(k, k) = -1.0;
    CMat C = CMat::Zero(K, K);
    C.row(k) = 2.0 * wk.row(k).cast<cd>().cwiseProduct(dir.row(k).conjugate());
    d.B.push_back(d.cp.combine(C));
    RVec sel = RVec::Zero(K);
    sel(k) = d.Gamma(k);
    d.Qhat.push_back(d.cp.noise_form(sel, params.sigma_z_sq));
    double vs = d.Gamma(k) * params.sigma_sq(k) - std::norm(dir(k, k));
    double lam = fro(k, k);
    for (Index i = 0; i < K; ++i)
      if (i != k) {
        vs += d.Gamma(k) * std::norm(dir(k, i));
        lam += d.Gamma(k) * fro(k, i);
      }
    d.varsigma(k) = vs;
    d.lambda(k) = lam;
    d.weight.push_back(std::move(wk));
  }
  d.Q2 = d.cp.reflect_form();
  return d;
}

/// Quartic majorizer of Γ_k Σ_{i≠k} |f_{k,i}|² − |f_{k,k}|² at θ_t.
inline QuarticSurrogate pm_quartic_surrogate(const PmThetaData& d, Index k, const CVec& theta_t) {
  return detail::quartic_from_weights(d.cp, d.weight[static_cast<std::size_t>(k)], theta_t,
                                      d.lambda(k));
}

/// Convex inner restriction of constraint k at θ_t:
/// θᴴ(Q̂_k + λ_q/2 I)θ + Re{θᴴβ_k} + c_k ≤ 0.
inline ConvexQuadConstraint build_pm_constraint_surrogate(const PmThetaData& d, Index k,
                                                          const CVec& theta_t,
                                                          const MajorizerOptions& opts = {},
                                                          CVec* warm = nullptr,
                                                          bool* spectral_converged = nullptr) {
  const auto ks = static_cast<std::size_t>(k);
  const QuarticSurrogate qs = pm_quartic_surrogate(d, k, theta_t);
  BlockPlusRankOne Pt = qs.Ft;
  Pt.base += d.B[ks];
  const IsotropicMajorizer mj = realify_and_majorize(Pt, theta_t, opts, warm);
  if (spectral_converged != nullptr) *spectral_converged = *spectral_converged && mj.spectral_converged;
  ConvexQuadConstraint c;
  c.Lambda = d.Qhat[ks];
  c.Lambda.add_identity(0.5 * mj.lambda);
  c.beta = mj.u;
  c.c = mj.c + qs.c + d.varsigma(k);
  return c;
}

/// ADMM θ-step of the power minimization: minimize θᴴ(Q2 + ρ/2 I)θ + Re{θᴴ(ω − ρϑ)}
/// over |θ_m| ≤ 1 subject to the K restricted SINR constraints.
inline ThetaQp build_pm_theta_qp(const PmThetaData& d, const CVec& theta_t, const CVec& vartheta,
                                 const CVec& omega, double rho, const MajorizerOptions& opts = {},
                                 std::vector<CVec>* warm = nullptr) {
  ThetaQp out;
  out.qp.Upsilon = d.Q2;
  out.qp.Upsilon.add_identity(0.5 * rho);
  out.qp.zeta = omega - rho * vartheta;
  const Index K = d.Gamma.size();
  if (warm != nullptr) warm->resize(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    CVec* wk = warm != nullptr ? &(*warm)[static_cast<std::size_t>(k)] : nullptr;
    out.qp.constraints.push_back(
        build_pm_constraint_surrogate(d, k, theta_t, opts, wk, &out.spectral_converged));
  }
  out.constant = 0.5 * rho * (vartheta - omega / rho).squaredNorm();
  return out;
}

}  // namespace subris

#endif  // SUBRIS_SURROGATES_HPP_
