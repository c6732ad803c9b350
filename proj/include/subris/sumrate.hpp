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

#ifndef SUBRIS_SUMRATE_HPP_
#define SUBRIS_SUMRATE_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "subris/fp.hpp"
#include "subris/model.hpp"
#include "subris/solvers/box_qcqp.hpp"
#include "subris/solvers/quad_max.hpp"
#include "subris/solvers/rcg.hpp"
#include "subris/surrogates.hpp"
#include "subris/types.hpp"

namespace subris {

/// Regularized channel-inverse directions (Σ_i h_i h_iᴴ + σ̃_k² I)⁻¹ h_k, one
/// per column, with σ̃_k² the effective noise of user k. Not normalized.
inline CMat mmse_directions(const ChannelSet& ch, const ReflectionOperator& op, const SystemParams& params) {
  const CMat H = composite_channels(ch, op);
  const Index N = H.rows(), K = H.cols();
  const CMat HH = H * H.adjoint();
  CMat D(N, K);
  for (Index k = 0; k < K; ++k) {
    CMat A = HH;
    A.diagonal().array() += effective_noise(k, ch, op, params);
    D.col(k) = A.ldlt().solve(H.col(k));
  }
  return D;
}

/// MMSE precoder with ‖w_k‖² = P_BS / K.
inline Precoder mmse_precoder(const ChannelSet& ch, const ReflectionOperator& op, const SystemParams& params) {
  CMat D = mmse_directions(ch, op, params);
  const double per_user = std::sqrt(params.P_BS / static_cast<double>(D.cols()));
  for (Index k = 0; k < D.cols(); ++k) {
    const double n = D.col(k).norm();
    if (n > 0) D.col(k) *= per_user / n;
  }
  return Precoder{D};
}

/// Phase initialization: maximize Σ_k ‖h_d,kᴴ + h_r,kᴴ diag(ψ) G‖² over
/// unit-modulus ψ (written in ψ̆ = ψ*), then θ_m = e^{j∠ψ_m / 2}.
inline CVec initial_phases(const ChannelSet& ch, const RcgOptions& opts = {}, RcgResult* info = nullptr) {
  const Index M = ch.G.rows(), K = ch.h_d.cols();
  CMat Mm = CMat::Zero(M, M);
  CVec m = CVec::Zero(M);
  for (Index k = 0; k < K; ++k) {
    const CMat R = ch.h_r.col(k).conjugate().asDiagonal() * ch.G;
    Mm += R * R.adjoint();
    m += 2.0 * R * ch.h_d.col(k);
  }
  // start from the phase-aligned maximizer of the linear term
  CVec psi0(M);
  for (Index i = 0; i < M; ++i) psi0(i) = m(i) == cd(0.0, 0.0) ? cd(1.0, 0.0) : m(i) / std::abs(m(i));
  const RcgResult r = rcg_unit_modulus(Mm, m, psi0, opts);
  if (info != nullptr) *info = r;
  CVec theta(M);
  for (Index i = 0; i < M; ++i) theta(i) = std::polar(1.0, 0.5 * std::arg(std::conj(r.psi(i))));
  return theta;
}

/// Scales a down, if needed, so that the amplifier output fits P_RIS.
inline void fit_amplification(const ChannelSet& ch, RisState& s, const Precoder& w, const SystemParams& params,
                              const SystemDims& dims) {
  const double avail = params.available_ris_power(dims);
  if (avail <= 0) {
    s.a.setZero();
    return;
  }
  const double used = ris_output_power(ch, ReflectionOperator(s, dims), w, params);
  if (used > avail) s.a *= std::sqrt(avail / used) * (1.0 - 1e-9);
}

struct InitialPoint {
  RisState state;
  Precoder w;
  RcgResult rcg;
};

/// θ from the phase initialization, a = 1_L (reduced if it overdraws the
/// budget), MMSE precoder at full power.
inline InitialPoint initialize(const ChannelSet& ch, const SystemDims& dims, const SystemParams& params,
                               const RcgOptions& opts = {}) {
  InitialPoint ip;
  ip.state.theta = initial_phases(ch, opts, &ip.rcg);
  ip.state.a = RVec::Ones(dims.L);
  if (!params.ris_budget_feasible(dims)) ip.state.a.setZero();
  ip.w = mmse_precoder(ch, ReflectionOperator(ip.state, dims), params);
  fit_amplification(ch, ip.state, ip.w, params, dims);
  return ip;
}

/// Splitting state of the unit-modulus constraint: θ = ϑ with |ϑ_m| = 1.
struct AdmmState {
  CVec vartheta;
  CVec omega;
  double rho = 1.0;

  void reset(const CVec& theta) {
    vartheta = theta;
    for (Index m = 0; m < vartheta.size(); ++m) {
      const double r = std::abs(vartheta(m));
      vartheta(m) = r > 0 ? vartheta(m) / r : cd(1.0, 0.0);
    }
    omega = CVec::Zero(theta.size());
  }
};

/// ϑ ← e^{j∠(ρθ + ω)}.
inline CVec phase_align(const CVec& z) {
  CVec out(z.size());
  for (Index m = 0; m < z.size(); ++m) out(m) = std::abs(z(m)) > 0 ? z(m) / std::abs(z(m)) : cd(1.0, 0.0);
  return out;
}

struct AdmmOptions {
  double tol = 1e-3;   // ‖θ − ϑ‖∞
  int max_iter = 100;
  SolverOptions solver{};
  MajorizerOptions majorizer{};
};

struct InnerRecord {
  double augmented_lagrangian = 0.0;
  double primal_residual = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

struct AdmmOutcome {
  CVec theta;  // projected to unit modulus
  int iterations = 0;
  bool converged = false;
  std::vector<InnerRecord> inner;
};

/// One ADMM pass: θ from the convex restriction at the current θ, then the
/// phase-aligned ϑ and the dual ascent on ω. Returns the unprojected θ; an
/// infeasible subproblem keeps the input θ.
inline CVec admm_step(const SumRateThetaData& d, const CVec& theta, AdmmState& admm, const AdmmOptions& opts,
                      InnerRecord& rec, CVec* warm = nullptr) {
  const ThetaQp q = build_theta_qp(d, theta, admm.vartheta, admm.omega, admm.rho, opts.majorizer, warm);
  const CVec start = 0.999 * theta;
  const BoxQcqpResult r = solve_box_qcqp_min(q.qp, opts.solver, &start);
  rec.status = r.report.status;
  const CVec next = r.report.status != SolveStatus::Infeasible ? r.theta : theta;
  admm.vartheta = phase_align(admm.rho * next + admm.omega);
  admm.omega += admm.rho * (next - admm.vartheta);
  rec.primal_residual = (next - admm.vartheta).cwiseAbs().maxCoeff();
  rec.augmented_lagrangian = d.objective(next) + admm.omega.dot(next - admm.vartheta).real() +
                             0.5 * admm.rho * (next - admm.vartheta).squaredNorm();
  return next;
}

/// θ-update of the rate maximization for fixed (μ, η, W, a).
inline AdmmOutcome admm_theta_loop(const SumRateThetaData& d, const CVec& theta0, AdmmState& admm,
                                   const AdmmOptions& opts = {}) {
  AdmmOutcome out;
  CVec theta = theta0;
  CVec warm;
  for (int it = 0; it < opts.max_iter; ++it) {
    InnerRecord rec;
    theta = admm_step(d, theta, admm, opts, rec, &warm);
    out.inner.push_back(rec);
    out.iterations = it + 1;
    if (rec.primal_residual <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.theta = phase_align(theta);
  return out;
}

struct SumRateOptions {
  double outer_tol = 1e-4;  // relative sum-rate change
  int max_outer = 30;
  bool reset_admm = false;
  bool skip_theta = false;
  /// Runs the same loop with the surface switched off (a = 0).
  bool disable_ris = false;
  double rho = 1.0;
  AdmmOptions admm{};
  SolverOptions solver{};
  RcgOptions rcg{};
};

/// Bookkeeping of one outer iteration. f2 values are in bits with the
/// auxiliaries held fixed inside the sweep; f1_* is f2 maximized over η.
struct OuterRecord {
  double f2_start = 0.0;   // old (μ, η), before the sweep
  double f1_old_mu = 0.0;  // max_η f2 at the old μ
  double f1_new_mu = 0.0;  // max_η f2 at the new μ
  double f2_old_eta = 0.0; // new μ, old η
  double f2_aux = 0.0;     // new μ, new η
  double f2_w = 0.0;       // after the precoder update
  double f2_theta = 0.0;   // after the phase update
  double f2_a = 0.0;       // after the amplification update
  double sum_rate = 0.0;
  double bs_power_used = 0.0;   // Σ‖w_k‖²
  double ris_power_used = 0.0;  // amplifier output
  SolveStatus w_status = SolveStatus::Optimal;
  SolveStatus a_status = SolveStatus::Optimal;
  int admm_iterations = 0;
  bool admm_converged = true;
  double admm_residual = 0.0;
  bool theta_over_budget = false;  // the θ-step left the incumbent a over budget
  std::vector<InnerRecord> inner;
};

struct RunTrace {
  double initial_sum_rate = 0.0;
  std::vector<OuterRecord> outer;
};

struct SumRateResult {
  Precoder w;
  RisState state;
  RunTrace trace;
  double sum_rate = 0.0;
  bool ris_infeasible = false;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double f1_bits(const ChannelSet& ch, const ReflectionOperator& op, const Precoder& w, const RVec& mu,
                      const SystemParams& params) {
  FpAux aux{mu, update_eta(ch, op, w, FpAux{mu, CVec()}, params)};
  return f2_objective(ch, op, w, aux, params);
}

}  // namespace detail

/// Alternates μ, η, W, θ (ADMM) and a until the sum rate settles.
inline SumRateResult run_sum_rate_max(const ChannelSet& ch, const SystemDims& dims, const SystemParams& params,
                                      const SumRateOptions& opts = {}, const InitialPoint* init = nullptr) {
  dims.validate();
  params.validate(dims);
  ch.validate(dims);
  SumRateResult res;
  res.ris_infeasible = !params.ris_budget_feasible(dims);
  const bool ris_on = !res.ris_infeasible && !opts.disable_ris;

  InitialPoint ip = init != nullptr ? *init : initialize(ch, dims, params, opts.rcg);
  RisState s = ip.state;
  Precoder w = ip.w;
  if (!ris_on) {
    s.a.setZero();
    w = mmse_precoder(ch, ReflectionOperator(s, dims), params);
  } else {
    fit_amplification(ch, s, w, params, dims);
  }

  AdmmState admm;
  admm.rho = opts.rho;
  admm.reset(s.theta);
  double rate = sum_rate(ch, ReflectionOperator(s, dims), w, params);
  res.trace.initial_sum_rate = rate;
  FpAux aux = refresh_aux(ch, ReflectionOperator(s, dims), w, params);

  for (int it = 0; it < opts.max_outer; ++it) {
    OuterRecord rec;
    ReflectionOperator op(s, dims);
    rec.f2_start = f2_objective(ch, op, w, aux, params);
    rec.f1_old_mu = detail::f1_bits(ch, op, w, aux.mu, params);
    const RVec mu = update_mu(ch, op, w, params);
    rec.f1_new_mu = detail::f1_bits(ch, op, w, mu, params);
    aux.mu = mu;
    rec.f2_old_eta = f2_objective(ch, op, w, aux, params);
    aux.eta = update_eta(ch, op, w, aux, params);
    rec.f2_aux = f2_objective(ch, op, w, aux, params);

    // precoder
    {
      const QuadMaxProblem p = assemble_w_problem(ch, op, aux, params, dims, ris_on);
      const QuadMaxResult r = solve_quad_max(p, opts.solver);
      rec.w_status = r.report.status;
      if (r.report.status != SolveStatus::Infeasible) {
        const Precoder cand = Precoder::from_stacked(r.w, dims.N, dims.K);
        // keep the incumbent if the candidate is worse (inexact solve)
        if (f2_objective(ch, op, cand, aux, params) >= f2_objective(ch, op, w, aux, params)) w = cand;
      }
    }
    rec.f2_w = f2_objective(ch, op, w, aux, params);

    // phases
    if (ris_on && !opts.skip_theta && s.a.maxCoeff() > 0) {
      if (opts.reset_admm) admm.reset(s.theta);
      const SumRateThetaData d = build_sumrate_theta_data(ch, s.a, w, aux, params, dims);
      const AdmmOutcome o = admm_theta_loop(d, s.theta, admm, opts.admm);
      s.theta = o.theta;
      rec.admm_iterations = o.iterations;
      rec.admm_converged = o.converged;
      rec.admm_residual = o.inner.empty() ? 0.0 : o.inner.back().primal_residual;
      rec.inner = o.inner;
    }
    rec.f2_theta = f2_objective(ch, ReflectionOperator(s, dims), w, aux, params);

    // amplification
    if (ris_on) {
      const QuadMaxProblem p = assemble_a_problem(ch, s.theta, w, aux, params, dims);
      const QuadMaxResult r = solve_quad_max(p, opts.solver);
      rec.a_status = r.report.status;
      RisState cand = s;
      if (r.report.status != SolveStatus::Infeasible) {
        cand.a = r.w.real().cwiseMax(0.0);
        const double before = f2_objective(ch, ReflectionOperator(s, dims), w, aux, params);
        const double after = f2_objective(ch, ReflectionOperator(cand, dims), w, aux, params);
        const double budget = params.available_ris_power(dims);
        const bool cur_ok = ris_output_power(ch, ReflectionOperator(s, dims), w, params) <= budget;
        rec.theta_over_budget = !cur_ok;
        // the θ-step can leave the incumbent over budget; the new a always wins then
        if (after >= before || !cur_ok) s = cand;
      }
      fit_amplification(ch, s, w, params, dims);
    }
    op = ReflectionOperator(s, dims);
    rec.f2_a = f2_objective(ch, op, w, aux, params);
    rec.sum_rate = sum_rate(ch, op, w, params);
    rec.bs_power_used = w.total_power();
    rec.ris_power_used = ris_output_power(ch, op, w, params);
    res.trace.outer.push_back(rec);
    res.iterations = it + 1;
    const double prev = rate;
    rate = rec.sum_rate;
    if (std::abs(rate - prev) <= opts.outer_tol * std::max(std::abs(rate), 1e-12)) {
      res.converged = true;
      break;
    }
  }
  res.w = w;
  res.state = s;
  res.sum_rate = rate;
  return res;
}

}  // namespace subris

#endif  // SUBRIS_SUMRATE_HPP_
