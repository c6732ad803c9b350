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

#ifndef SUBRIS_POWERMIN_HPP_
#define SUBRIS_POWERMIN_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "subris/fp.hpp"
#include "subris/model.hpp"
#include "subris/solvers/box_qcqp.hpp"
#include "subris/solvers/socp.hpp"
#include "subris/sumrate.hpp"
#include "subris/surrogates.hpp"
#include "subris/types.hpp"

namespace subris {

/// min_k γ_k / Γ_k − 1.
inline double min_sinr_slack(const RVec& sinr, const RVec& Gamma) {
  return (sinr.array() / Gamma.array()).minCoeff() - 1.0;
}

/// Dynamic (w, θ, a)-dependent part of the consumption:
/// ν1⁻¹ Σ‖w_k‖² + ν2⁻¹ (Σ‖ΨGw_k‖² + ‖Ψ‖_F²σ_z²).
inline double dynamic_power(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                            const SystemParams& params) {
  return w.total_power() / params.nu1 + ris_output_power(ch, op, w, params) / params.nu2;
}

inline double total_power(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w,
                          const SystemParams& params, const SystemDims& dims) {
  return bs_power(w, params) + ris_power(ch, op, w, params, dims);
}

struct PrecoderStep {
  Precoder w;
  SolveReport report;
};

/// Transmit power minimization for fixed (θ, a):
/// min ν1⁻¹Σ‖w_k‖² + ν2⁻¹Σ‖ΨGw_k‖² s.t. γ_k ≥ Γ_k.
///
/// With h_kᴴw_k rotated onto the positive real axis each target reads
/// ‖[h_kᴴw_i]_{i≠k}, σ̃_k‖ ≤ Γ_k^{-1/2} Re{h_kᴴw_k}, a second-order cone in the
/// realified stacked precoder [Re w; Im w].
inline PrecoderStep solve_socp_power(const ChannelSet& ch, const ReflectionOperator& op, const SystemParams& params,
                                     const SolverOptions& opts = {}, const Precoder* start = nullptr) {
  const Index N = ch.h_d.rows(), K = ch.h_d.cols(), n = N * K;
  require(params.Gamma.size() == K && (params.Gamma.array() > 0).all(), "solve_socp_power: Gamma must be positive");
  const CMat H = composite_channels(ch, op);
  const CMat PsiG = op.apply(ch.G);
  const CMat C0 = CMat::Identity(N, N) / params.nu1 + PsiG.adjoint() * PsiG / params.nu2;
  SocpProblem p;
  p.P = RMat::Zero(2 * n, 2 * n);
  for (Index k = 0; k < K; ++k) {
    const Index o = k * N;
    p.P.block(o, o, N, N) = C0.real();
    p.P.block(o, n + o, N, N) = -C0.imag();
    p.P.block(n + o, o, N, N) = C0.imag();
    p.P.block(n + o, n + o, N, N) = C0.real();
  }
  p.P = 0.5 * (p.P + p.P.transpose());
  p.q = RVec::Zero(2 * n);
  p.G = RMat(0, 2 * n);
  p.h = RVec(0);
  // rows of x ↦ Re / Im of h_kᴴ w_i
  auto re_row = [&](Index k, Index i) {
    RVec r = RVec::Zero(2 * n);
    r.segment(i * N, N) = H.col(k).real();
    r.segment(n + i * N, N) = H.col(k).imag();
    return r;
  };
  auto im_row = [&](Index k, Index i) {
    RVec r = RVec::Zero(2 * n);
    r.segment(i * N, N) = -H.col(k).imag();
    r.segment(n + i * N, N) = H.col(k).real();
    return r;
  };
  for (Index k = 0; k < K; ++k) {
    const double s = std::sqrt(effective_noise(k, ch, op, params));
    require(s > 0, "solve_socp_power: effective noise must be positive");
    SecondOrderCone c;
    c.A = RMat::Zero(2 * (K - 1) + 1, 2 * n);
    c.b = RVec::Zero(2 * (K - 1) + 1);
    Index r = 0;
    for (Index i = 0; i < K; ++i) {
      if (i == k) continue;
      c.A.row(r++) = re_row(k, i).transpose() / s;
      c.A.row(r++) = im_row(k, i).transpose() / s;
    }
    c.b(r) = 1.0;
    c.c = re_row(k, k) / (s * std::sqrt(params.Gamma(k)));
    c.d = 0.0;
    p.cones.push_back(std::move(c));
  }
  RVec x0;
  const RVec* xs = nullptr;
  if (start != nullptr) {
    CMat W = start->W;
    for (Index k = 0; k < K; ++k) {
      const cd g = H.col(k).dot(W.col(k));
      if (std::abs(g) > 0) W.col(k) *= std::conj(g) / std::abs(g);
    }
    const CVec ws = Precoder{W}.stacked();
    x0.resize(2 * n);
    x0 << ws.real(), ws.imag();
    xs = &x0;
  }
  const SocpResult r = solve_socp(p, opts, xs);
  PrecoderStep out;
  out.report = r.report;
  CVec ws(n);
  for (Index j = 0; j < n; ++j) ws(j) = cd(r.x(j), r.x(n + j));
  out.w = Precoder::from_stacked(ws, N, K);
  return out;
}

struct AmplifierStep {
  RVec a;
  SolveReport report;
  int rounds = 0;
};

namespace detail {

/// Convex restriction of the targets around the phases φ_k of
/// d_kk + b_kkᴴa at the anchor: Re{e^{−jφ_k}(d_kk + b_kkᴴa)} replaces the
/// modulus.
inline SocpProblem anchored_a_problem(const AmplifierTerms& at, const RVec& anchor, const SystemParams& params) {
  const Index K = at.K, L = at.L;
  SocpProblem p;
  p.P = at.t.asDiagonal();
  p.q = RVec::Zero(L);
  p.G = -RMat::Identity(L, L);
  p.h = RVec::Zero(L);
  for (Index k = 0; k < K; ++k) {
    const double s = std::sqrt(params.sigma_sq(k));
    const CVec& bkk = at.b_at(k, k);
    const cd y = at.direct(k, k) + bkk.dot(anchor.cast<cd>());
    const cd rot = std::abs(y) > 0 ? std::conj(y) / std::abs(y) : cd(1.0, 0.0);
    SecondOrderCone c;
    const Index rows = 2 * (K - 1) + L + 1;
    c.A = RMat::Zero(rows, L);
    c.b = RVec::Zero(rows);
    Index r = 0;
    for (Index i = 0; i < K; ++i) {
      if (i == k) continue;
      const CVec& b = at.b_at(k, i);
      // d + bᴴa = (Re d + Re bᵀa) + j(Im d − Im bᵀa)
      c.A.row(r) = b.real().transpose() / s;
      c.b(r++) = at.direct(k, i).real() / s;
      c.A.row(r) = -b.imag().transpose() / s;
      c.b(r++) = at.direct(k, i).imag() / s;
    }
    for (Index l = 0; l < L; ++l) c.A(r + l, l) = std::sqrt(at.s(l, k)) / s;
    r += L;
    c.b(r) = 1.0;
    const double g = 1.0 / std::sqrt(params.Gamma(k));
    c.c = (rot * bkk.conjugate()).real() * g / s;
    c.d = (rot * at.direct(k, k)).real() * g / s;
    p.cones.push_back(std::move(c));
  }
  return p;
}

inline RVec amplifier_sinr(const AmplifierTerms& at, const RVec& a, const SystemParams& params) {
  RVec g(at.K);
  const CVec ac = a.cast<cd>();
  for (Index k = 0; k < at.K; ++k) {
    double den = params.sigma_sq(k) + (at.s.col(k).array() * a.array().square()).sum();
    double num = 0.0;
    for (Index i = 0; i < at.K; ++i) {
      const double v = std::norm(at.direct(k, i) + at.b_at(k, i).dot(ac));
      if (i == k) num = v; else den += v;
    }
    g(k) = num / den;
  }
  return g;
}

}  // namespace detail

/// Amplification update for fixed (w, θ): min aᵀTa s.t. γ_k(a) ≥ Γ_k, a ≥ 0,
/// by successive phase-anchored cone programs started at the feasible a0.
inline AmplifierStep solve_a_socp_min(const ChannelSet& ch, const CVec& theta, const Precoder& w, const RVec& a0,
                                      const SystemParams& params, const SystemDims& dims,
                                      const SolverOptions& opts = {}, int max_rounds = 5) {
  const AmplifierTerms at = build_amplifier_terms(ch, theta, w, params, dims);
  AmplifierStep out;
  out.a = a0;
  const RVec zero = RVec::Zero(dims.L);
  if ((detail::amplifier_sinr(at, zero, params).array() >= params.Gamma.array()).all()) {
    out.a = zero;
    out.report.objective = 0.0;
    return out;
  }
  double best = a0.dot(at.t.cwiseProduct(a0));
  out.report.objective = best;
  out.report.status = SolveStatus::Optimal;
  RVec anchor = a0;
  for (int r = 0; r < max_rounds; ++r) {
    const SocpProblem p = detail::anchored_a_problem(at, anchor, params);
    const SocpResult s = solve_socp(p, opts, &anchor);
    ++out.rounds;
    if (s.report.status == SolveStatus::Infeasible) {
      if (r == 0) out.report = s.report;
      break;
    }
    const RVec cand = s.x.cwiseMax(0.0);
    const RVec g = detail::amplifier_sinr(at, cand, params);
    const double val = cand.dot(at.t.cwiseProduct(cand));
    if (!((g.array() >= params.Gamma.array() * (1.0 - 1e-9)).all())) break;
    out.report = s.report;
    const bool improved = val < best * (1.0 - 1e-9);
    if (val <= best) {
      best = val;
      out.a = cand;
      out.report.objective = val;
    }
    if (!improved) break;
    anchor = cand;
  }
  return out;
}

struct PmAdmmOutcome {
  AdmmOutcome admm;
  bool stopped_infeasible = false;
};

/// θ-update of the power minimization: ADMM over the convex restrictions of
/// the targets; stops early, keeping the last solved θ, when a restricted
/// problem has no feasible point.
inline PmAdmmOutcome pm_admm_theta_loop(const PmThetaData& d, const CVec& theta0, AdmmState& admm,
                                        const AdmmOptions& opts = {}) {
  PmAdmmOutcome out;
  CVec theta = theta0;
  std::vector<CVec> warm;
  for (int it = 0; it < opts.max_iter; ++it) {
    const ThetaQp q = build_pm_theta_qp(d, theta, admm.vartheta, admm.omega, admm.rho, opts.majorizer, &warm);
    const BoxQcqpResult r = solve_box_qcqp_min(q.qp, opts.solver, &theta);
    InnerRecord rec;
    rec.status = r.report.status;
    if (r.report.status == SolveStatus::Infeasible) {
      out.stopped_infeasible = true;
      break;
    }
    theta = r.theta;
    admm.vartheta = phase_align(admm.rho * theta + admm.omega);
    admm.omega += admm.rho * (theta - admm.vartheta);
    rec.primal_residual = (theta - admm.vartheta).cwiseAbs().maxCoeff();
    rec.augmented_lagrangian = d.objective(theta) + admm.omega.dot(theta - admm.vartheta).real() +
                               0.5 * admm.rho * (theta - admm.vartheta).squaredNorm();
    out.admm.inner.push_back(rec);
    out.admm.iterations = it + 1;
    if (rec.primal_residual <= opts.tol) {
      out.admm.converged = true;
      break;
    }
  }
  out.admm.theta = phase_align(theta);
  return out;
}

struct PowerMinOptions {
  double outer_tol = 1e-4;  // relative total-power change
  int max_outer = 30;
  double guard_tol = 1e-3;  // relative SINR shortfall tolerated by the θ guard
  bool reset_admm = false;
  double rho = 1.0;
  AdmmOptions admm{};
  SolverOptions solver{};
  RcgOptions rcg{};
};

struct PmOuterRecord {
  double power_start = 0.0;
  double power_w = 0.0;
  double power_theta = 0.0;
  double power_a = 0.0;
  double min_sinr_slack = 0.0;
  SolveStatus w_status = SolveStatus::Optimal;
  SolveStatus a_status = SolveStatus::Optimal;
  bool theta_accepted = false;
  bool theta_stopped_infeasible = false;
  int admm_iterations = 0;
  bool admm_converged = true;
  double admm_residual = 0.0;
  std::vector<InnerRecord> inner;
};

struct PmRunTrace {
  double initial_power = 0.0;
  std::vector<PmOuterRecord> outer;
};

struct PowerMinResult {
  Precoder w;
  RisState state;
  PmRunTrace trace;
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  double total_power = 0.0;
  double bs_power = 0.0;
  double ris_power = 0.0;
  RVec sinr;
};

struct PmStart {
  RisState state;
  Precoder w;
  bool feasible = false;
};

/// Phase initialization and a = 1_L as for the rate maximization; MMSE
/// directions scaled by a common factor, found by bisection, until every
/// target is met. Falls back to the cone program for W, then to a = 0.
inline PmStart initialize_power_min(const ChannelSet& ch, const SystemDims& dims, const SystemParams& params,
                                    const PowerMinOptions& opts = {}) {
  PmStart st;
  st.state.theta = initial_phases(ch, opts.rcg);
  st.state.a = RVec::Ones(dims.L);
  if (!params.ris_budget_feasible(dims)) st.state.a.setZero();
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ReflectionOperator op(st.state, dims);
    CMat D = mmse_directions(ch, op, params);
    for (Index k = 0; k < D.cols(); ++k)
      if (D.col(k).norm() > 0) D.col(k).normalize();
    auto meets = [&](double c) {
      const RVec g = sinr_all(ch, op, Precoder{c * D}, params);
      return (g.array() >= params.Gamma.array()).all();
    };
    double hi = 1.0;
    int guard = 0;
    while (!meets(hi) && guard++ < 60) hi *= 4.0;
    if (meets(hi)) {
      double lo = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (meets(mid) ? hi : lo) = mid;
      }
      st.w = Precoder{hi * D};
      st.feasible = true;
      return st;
    }
    const PrecoderStep ps = solve_socp_power(ch, op, params, opts.solver);
    if (ps.report.status != SolveStatus::Infeasible &&
        (sinr_all(ch, op, ps.w, params).array() >= params.Gamma.array() * (1.0 - 1e-9)).all()) {
      st.w = ps.w;
      st.feasible = true;
      return st;
    }
    st.state.a.setZero();
  }
  st.w = Precoder{CMat::Zero(dims.N, dims.K)};
  return st;
}

/// Alternates W (cone program), θ (guarded ADMM) and a (anchored cone
/// programs) until the total consumption settles.
inline PowerMinResult run_power_min(const ChannelSet& ch, const SystemDims& dims, const SystemParams& params,
                                    const PowerMinOptions& opts = {}) {
  dims.validate();
  params.validate(dims);
  ch.validate(dims);
  require(params.Gamma.size() == dims.K && (params.Gamma.array() > 0).all(),
          "run_power_min: Gamma must have K positive entries");
  PowerMinResult res;
  PmStart st = initialize_power_min(ch, dims, params, opts);
  RisState s = st.state;
  Precoder w = st.w;
  auto power = [&](const RisState& rs, const Precoder& pw) {
    return total_power(ch, ReflectionOperator(rs, dims), pw, params, dims);
  };
  auto meets = [&](const RisState& rs, const Precoder& pw, double tol) {
    const RVec g = sinr_all(ch, ReflectionOperator(rs, dims), pw, params);
    return (g.array() >= params.Gamma.array() * (1.0 - tol)).all();
  };
  res.feasible = st.feasible;
  if (!st.feasible) {
    res.w = w;
    res.state = s;
    res.sinr = sinr_all(ch, ReflectionOperator(s, dims), w, params);
    return res;
  }
  AdmmState admm;
  admm.rho = opts.rho;
  admm.reset(s.theta);
  double P = power(s, w);
  res.trace.initial_power = P;

  for (int it = 0; it < opts.max_outer; ++it) {
    PmOuterRecord rec;
    rec.power_start = P;
    {
      const PrecoderStep ps = solve_socp_power(ch, ReflectionOperator(s, dims), params, opts.solver, &w);
      rec.w_status = ps.report.status;
      if (ps.report.status != SolveStatus::Infeasible && meets(s, ps.w, 1e-9) && power(s, ps.w) <= power(s, w))
        w = ps.w;
    }
    rec.power_w = power(s, w);

    if (s.a.maxCoeff() > 0) {
      if (opts.reset_admm) admm.reset(s.theta);
      const PmThetaData d = build_pm_constraint_data(ch, s.a, w, params, dims);
      const PmAdmmOutcome o = pm_admm_theta_loop(d, s.theta, admm, opts.admm);
      rec.admm_iterations = o.admm.iterations;
      rec.admm_converged = o.admm.converged;
      rec.admm_residual = o.admm.inner.empty() ? 0.0 : o.admm.inner.back().primal_residual;
      rec.theta_stopped_infeasible = o.stopped_infeasible;
      rec.inner = o.admm.inner;
      RisState cand = s;
      cand.theta = o.admm.theta;
      // guard: true targets and no growth of the reflected power
      if (meets(cand, w, opts.guard_tol) && d.objective(cand.theta) <= d.objective(s.theta)) {
        s = cand;
        rec.theta_accepted = true;
      }
    }
    rec.power_theta = power(s, w);

    if (s.a.maxCoeff() > 0 || !meets(s, w, 0.0)) {
      const AmplifierStep as = solve_a_socp_min(ch, s.theta, w, s.a, params, dims, opts.solver);
      rec.a_status = as.report.status;
      RisState cand = s;
      cand.a = as.a;
      if (meets(cand, w, 1e-9) && power(cand, w) <= power(s, w)) s = cand;
    }
    rec.power_a = power(s, w);
    rec.min_sinr_slack = min_sinr_slack(sinr_all(ch, ReflectionOperator(s, dims), w, params), params.Gamma);
    res.trace.outer.push_back(rec);
    res.iterations = it + 1;
    const double prev = P;
    P = rec.power_a;
    if (std::abs(prev - P) <= opts.outer_tol * P) {
      res.converged = true;
      break;
    }
  }
  const ReflectionOperator op(s, dims);
  res.w = w;
  res.state = s;
  res.total_power = P;
  res.bs_power = bs_power(w, params);
  res.ris_power = ris_power(ch, op, w, params, dims);
  res.sinr = sinr_all(ch, op, w, params);
  return res;
}

}  // namespace subris

#endif  // SUBRIS_POWERMIN_HPP_
