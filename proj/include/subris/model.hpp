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

#ifndef SUBRIS_MODEL_HPP_
#define SUBRIS_MODEL_HPP_

#include <cmath>
#include <string>

#include "subris/types.hpp"

namespace subris {

/// Array and network dimensions. M elements are split into L sub-arrays of
/// Q = M / L elements, each sub-array sharing one reflection amplifier.
struct SystemDims {
  int N = 16;   // BS antennas
  int K = 4;    // single-antenna users
  int M = 256;  // RIS elements
  int L = 256;  // amplifiers

  int Q() const { return M / L; }

  void validate() const {
    require(K >= 1, "SystemDims: K must be at least 1");
    require(N >= K, "SystemDims: N must be at least K");
    require(L >= 1 && M >= L, "SystemDims: need M >= L >= 1");
    require(M % L == 0, "SystemDims: L = " + std::to_string(L) +
                            " does not divide M = " + std::to_string(M));
  }
};

/// Physical constants, all in linear units (watts, linear SINR).
struct SystemParams {
  double P_BS = 1.0;
  double P_RIS_tot = std::pow(10.0, 0.415);  // 4.15 dBW
  double W_BS = std::pow(10.0, 0.6);          // 6 dBW
  double W_PS = std::pow(10.0, 0.7) * 1e-3;   // 7 dBm
  double W_PA = std::pow(10.0, 0.7) * 1e-3;
  double nu1 = 1.0 / 1.1;
  double nu2 = 1.0 / 1.1;
  RVec sigma_sq;  // per-user noise power
  double sigma_z_sq = 1e-11;
  RVec Gamma;  // per-user SINR targets, power minimization only

  double static_ris_power(const SystemDims& d) const {
    return d.M * W_PS + d.L * W_PA;
  }

  /// Power left for amplification, ν2 (P_RIS_tot − M W_PS − L W_PA). May be
  /// negative; callers must check ris_budget_feasible().
  double available_ris_power(const SystemDims& d) const {
    return nu2 * (P_RIS_tot - static_ris_power(d));
  }

  bool ris_budget_feasible(const SystemDims& d) const {
    return available_ris_power(d) > 0.0;
  }

  void validate(const SystemDims& d) const {
    require(P_BS >= 0 && P_RIS_tot >= 0 && W_BS >= 0 && W_PS >= 0 && W_PA >= 0,
            "SystemParams: powers must be nonnegative");
    require(nu1 > 0 && nu1 <= 1 && nu2 > 0 && nu2 <= 1,
            "SystemParams: efficiencies must lie in (0, 1]");
    require(sigma_sq.size() == d.K, "SystemParams: sigma_sq must have K entries");
    require((sigma_sq.array() >= 0).all() && sigma_z_sq >= 0,
            "SystemParams: noise powers must be nonnegative");
    require(Gamma.size() == 0 || Gamma.size() == d.K,
            "SystemParams: Gamma must be empty or have K entries");
  }
};

/// Phase shifts θ (M) and amplification factors a (L) of the surface.
struct RisState {
  CVec theta;
  RVec a;
};

/// BS-to-user, BS-to-RIS and RIS-to-user channels for one realization.
/// Column k of h_d (N x K) and h_r (M x K) belongs to user k; G is M x N.
struct ChannelSet {
  CMat h_d;
  CMat G;
  CMat h_r;

  void validate(const SystemDims& d) const {
    require(h_d.rows() == d.N && h_d.cols() == d.K, "ChannelSet: h_d must be N x K");
    require(G.rows() == d.M && G.cols() == d.N, "ChannelSet: G must be M x N");
    require(h_r.rows() == d.M && h_r.cols() == d.K, "ChannelSet: h_r must be M x K");
    require(h_d.allFinite() && G.allFinite() && h_r.allFinite(),
            "ChannelSet: non-finite channel entry");
  }
};

/// Transmit precoders, column k is w_k (N x K).
struct Precoder {
  CMat W;

  /// [w_1ᵀ, ..., w_Kᵀ]ᵀ.
  CVec stacked() const { return Eigen::Map<const CVec>(W.data(), W.size()); }

  static Precoder from_stacked(const CVec& w, Index N, Index K) {
    require(w.size() == N * K, "Precoder: stacked length must be N*K");
    return Precoder{Eigen::Map<const CMat>(w.data(), N, K)};
  }

  double total_power() const { return W.squaredNorm(); }
};

/// Reflection operator Ψ = diag(θ) Ξ diag(θ) with Ξ = Q^{-1/2} Eᵀ diag(a) E.
///
/// Ψ is block diagonal with rank-one blocks a_l / √Q · θ̃_l θ̃_lᵀ. It is never
/// formed densely; products run block by block in O(M) per vector.
class ReflectionOperator {
 public:
  ReflectionOperator(const RisState& state, const SystemDims& dims)
      : theta_(state.theta), a_(state.a), L_(dims.L), Q_(dims.Q()) {
    dims.validate();
    require(theta_.size() == dims.M, "ReflectionOperator: theta must have M entries");
    require(a_.size() == dims.L, "ReflectionOperator: a must have L entries");
  }

  Index M() const { return theta_.size(); }
  Index L() const { return L_; }
  Index Q() const { return Q_; }
  const CVec& theta() const { return theta_; }
  const RVec& a() const { return a_; }

  /// Scale of block l of Ξ: every entry of that block equals a_l / √Q.
  double xi_scale(Index l) const { return a_(l) / std::sqrt(static_cast<double>(Q_)); }

  /// Ψ x.
  CVec apply(const CVec& x) const {
    CVec y(M());
    for (Index l = 0; l < L_; ++l) {
      auto t = theta_.segment(l * Q_, Q_);
      const cd combined = (t.array() * x.segment(l * Q_, Q_).array()).sum();
      y.segment(l * Q_, Q_) = (xi_scale(l) * combined) * t;
    }
    return y;
  }

  /// Ψᴴ y.
  CVec apply_adjoint(const CVec& y) const {
    CVec x(M());
    for (Index l = 0; l < L_; ++l) {
      auto t = theta_.segment(l * Q_, Q_);
      const cd combined = t.dot(y.segment(l * Q_, Q_));  // θ̃ᴴ y_l
      x.segment(l * Q_, Q_) = (xi_scale(l) * combined) * t.conjugate();
    }
    return x;
  }

  /// Ψ X, column by column.
  CMat apply(const CMat& X) const {
    CMat Y(M(), X.cols());
    for (Index c = 0; c < X.cols(); ++c) Y.col(c) = apply(CVec(X.col(c)));
    return Y;
  }

  /// Block l of Ψ (Q x Q).
  CMat psi_block(Index l) const {
    auto t = theta_.segment(l * Q_, Q_);
    return xi_scale(l) * (t * t.transpose());
  }

  /// ‖Ψ‖_F² for arbitrary θ: Σ_l a_l²/Q ‖θ̃_l‖⁴.
  double frobenius_sq() const {
    double s = 0.0;
    for (Index l = 0; l < L_; ++l) {
      const double n2 = theta_.segment(l * Q_, Q_).squaredNorm();
      s += a_(l) * a_(l) / Q_ * n2 * n2;
    }
    return s;
  }

 private:
  CVec theta_;
  RVec a_;
  Index L_;
  Index Q_;
};

inline ReflectionOperator build_reflection_operator(const RisState& state,
                                                    const SystemDims& dims) {
  return ReflectionOperator(state, dims);
}

/// ‖Ψ‖_F² in closed form Q Σ_l a_l², valid for unit-modulus θ.
inline double ris_frobenius_power(const ReflectionOperator& op) {
  return static_cast<double>(op.Q()) * op.a().squaredNorm();
}

/// h_k = h_d,k + Gᴴ Ψᴴ h_r,k, so that h_kᴴ = h_d,kᴴ + h_r,kᴴ Ψ G.
inline CVec composite_channel(Index k, const ChannelSet& ch, const ReflectionOperator& op) {
  return ch.h_d.col(k) + ch.G.adjoint() * op.apply_adjoint(CVec(ch.h_r.col(k)));
}

/// All composite channels as columns of an N x K matrix.
inline CMat composite_channels(const ChannelSet& ch, const ReflectionOperator& op) {
  CMat H(ch.h_d.rows(), ch.h_d.cols());
  for (Index k = 0; k < H.cols(); ++k) H.col(k) = composite_channel(k, ch, op);
  return H;
}

/// ‖h_r,kᴴ Ψ‖² σ_z² + σ_k²: the noise seen by user k.
inline double effective_noise(Index k, const ChannelSet& ch, const ReflectionOperator& op,
                              const SystemParams& params) {
  return op.apply_adjoint(CVec(ch.h_r.col(k))).squaredNorm() * params.sigma_z_sq +
         params.sigma_sq(k);
}

/// Per-user SINR given precomputed composite channels.
inline RVec sinr_all(const CMat& H, const ChannelSet& ch, const ReflectionOperator& op,
                     const Precoder& w, const SystemParams& params) {
  const CMat gains = H.adjoint() * w.W;  // (k, i) = h_kᴴ w_i
  RVec out(H.cols());
  for (Index k = 0; k < H.cols(); ++k) {
    const double signal = std::norm(gains(k, k));
    const double interference = gains.row(k).squaredNorm() - signal;
    out(k) = signal / (interference + effective_noise(k, ch, op, params));
  }
  return out;
}

inline RVec sinr_all(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                     const SystemParams& params) {
  return sinr_all(composite_channels(ch, op), ch, op, w, params);
}

inline double sinr(Index k, const ChannelSet& ch, const ReflectionOperator& op,
                   const Precoder& w, const SystemParams& params) {
  const CVec h = composite_channel(k, ch, op);
  double interference = 0.0;
  for (Index i = 0; i < w.W.cols(); ++i)
    if (i != k) interference += std::norm(h.dot(w.W.col(i)));
  return std::norm(h.dot(w.W.col(k))) / (interference + effective_noise(k, ch, op, params));
}

/// Σ_k log2(1 + γ_k) in bits/s/Hz.
inline double sum_rate(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                       const SystemParams& params) {
  return sinr_all(ch, op, w, params).array().log1p().sum() / std::log(2.0);
}

inline double bs_power(const Precoder& w, const SystemParams& params) {
  return w.total_power() / params.nu1 + params.W_BS;
}

/// Σ_k ‖Ψ G w_k‖² + ‖Ψ‖_F² σ_z²: the power radiated by the amplifiers.
inline double ris_output_power(const ChannelSet& ch, const ReflectionOperator& op,
                               const Precoder& w, const SystemParams& params) {
  return op.apply(CMat(ch.G * w.W)).squaredNorm() + op.frobenius_sq() * params.sigma_z_sq;
}

inline double ris_power(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                        const SystemParams& params, const SystemDims& dims) {
  return ris_output_power(ch, op, w, params) / params.nu2 + params.static_ris_power(dims);
}

}  // namespace subris

#endif  // SUBRIS_MODEL_HPP_
