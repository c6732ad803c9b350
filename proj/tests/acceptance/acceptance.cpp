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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <string>
#include <thread>
#include <vector>

#include "desk_instance.hpp"
#include "oracle/dense_oracle.hpp"
#include "oracle/solver_oracle.hpp"
#include "oracle/surrogate_oracle.hpp"
#include "subris/subris.hpp"

namespace {

using namespace subris;
using oracle::Instance;

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Running maximum of a nonnegative error, with the worst case kept for the report.
struct Worst {
  double value = 0.0;
  void add(double v) {
    if (!(v <= value)) value = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

harness::ExperimentConfig desk_config() {
  return harness::load_config(std::string(SUBRIS_SOURCE_DIR) + "/configs/desk.cfg");
}

// ------------------------------------------------------------------- 1

Verdict static_power_cutoff() {
  Verdict v;
  SystemDims full{16, 4, 256, 256};
  SystemParams p;
  const double stat = p.static_ris_power(full);
  const double ref = 512.0 * std::pow(10.0, 0.7) / 1000.0;
  v.pass = std::abs(stat - ref) <= 1e-12 * ref && std::round(stat * 1000.0) == 2566.0;
  p.P_RIS_tot = std::pow(10.0, 0.4);
  v.pass = v.pass && !p.ris_budget_feasible(full);
  p.P_RIS_tot = std::pow(10.0, 0.415);
  v.pass = v.pass && p.ris_budget_feasible(full);

  harness::ExperimentConfig c;
  harness::override_preset(c, "sumrate_vs_pris");
  const harness::Scenario s = harness::make_scenario(c, std::pow(10.0, 0.4), "fully", 0);
  const SumRateOptions o = harness::sumrate_options(c);
  SumRateOptions off = o;
  off.disable_ris = true;
  const SumRateResult r = run_sum_rate_max(s.ch, s.dims, s.params, o);
  const SumRateResult n = run_sum_rate_max(s.ch, s.dims, s.params, off);
  v.pass = v.pass && r.ris_infeasible && r.sum_rate == n.sum_rate && r.state.a.norm() == 0.0;
  v.detail = "static " + fmt("%.6f", stat) + " W, rate at 4.0 dBW " + fmt("%.6f", r.sum_rate) + " vs no-RIS " +
             fmt("%.6f", n.sum_rate);
  return v;
}

// ------------------------------------------------------------------- 2

Verdict fp_tightness() {
  Worst err;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int L = seed % 3 == 0 ? 16 : (seed % 3 == 1 ? 4 : 2);
    auto in = oracle::random_instance(seed, 4, 1 + static_cast<int>(seed % 4), 16, L);
    ReflectionOperator op(in.state, in.dims);
    const FpAux aux = refresh_aux(in.ch, op, in.w, in.params);
    err.add(std::abs(f2_objective(in.ch, op, in.w, aux, in.params) - sum_rate(in.ch, op, in.w, in.params)));
  }
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto d = testing::desk_instance(seed, 16, seed % 2 ? 4 : 16);
    const InitialPoint ip = initialize(d.ch, d.dims, d.params);
    ReflectionOperator op(ip.state, d.dims);
    const FpAux aux = refresh_aux(d.ch, op, ip.w, d.params);
    err.add(std::abs(f2_objective(d.ch, op, ip.w, aux, d.params) - sum_rate(d.ch, op, ip.w, d.params)));
  }
  return {err.value <= 1e-8, "200 instances, max |f2 - rate| " + fmt("%.2e", err.value)};
}

// ------------------------------------------------------------------- 3

// Tightness at the expansion point and domination at 200 test points, both
// relative to the instance scale.
struct MajorizationTally {
  Worst gap, violation;
  void check(double scale, double at_t, double target_t, const std::function<double(const CVec&)>& sur,
             const std::function<double(const CVec&)>& target, const std::function<CVec(int)>& point) {
    gap.add(std::abs(at_t - target_t) / scale);
    for (int j = 0; j < 200; ++j) {
      const CVec th = point(j);
      violation.add(std::max(0.0, target(th) - sur(th)) / scale);
    }
  }
  std::string str(const char* name) const {
    return std::string(name) + " tight " + fmt("%.1e", gap.value) + " viol " + fmt("%.1e", violation.value);
  }
  bool ok() const { return gap.value <= 1e-10 && violation.value <= 1e-8; }
};

Verdict majorization() {
  MajorizationTally quartic, chain, iso, pmq, pmc;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    CounterRng rng(seed);
    const Index M = seed % 2 ? 4 : 6;
    const int L = seed % 4 == 1 ? 2 : (seed % 4 == 3 ? 1 : static_cast<int>(M));
    auto in = oracle::random_instance(500 + seed, 3, 2, static_cast<int>(M), L);
    auto point = [&](int j) { return oracle::test_point(rng, M, j); };

    // rate quartic term
    const FpAux aux = oracle::random_aux(rng, 2);
    const auto d = build_sumrate_theta_data(in.ch, in.state.a, in.w, aux, in.params, in.dims);
    const CVec tt = oracle::random_phases(rng, M);
    const QuarticSurrogate qs = surrogate_quartic(d, tt);
    const double msq = static_cast<double>(M * M);
    auto dq = [&](const CVec& th) { return oracle::dense_quartic(in, d.weight, th); };
    quartic.check(1 + d.lambda_f * msq, qs.value(tt), dq(tt), [&](const CVec& th) { return qs.value(th); }, dq,
                  point);

    // full θ-step surrogate of the augmented Lagrangian
    ReflectionOperator op(in.state, in.dims);
    const FpAux ra = refresh_aux(in.ch, op, in.w, in.params);
    const auto dr = build_sumrate_theta_data(in.ch, in.state.a, in.w, ra, in.params, in.dims);
    const CVec vt = oracle::random_phases(rng, M);
    const CVec om = oracle::random_cvec(rng, M, 0.1);
    const ThetaQp q = build_theta_qp(dr, tt, vt, om, 1.0);
    double c0 = 0.0;
    for (Index k = 0; k < 2; ++k) {
      for (Index i = 0; i < 2; ++i) c0 += dr.eta_sq(k) * std::norm(dr.cp.direct()(k, i));
      c0 -= (dr.lin(k) * dr.cp.direct()(k, k)).real();
    }
    auto al = [&](const CVec& th) { return dr.objective(th) + 0.5 * (th - vt + om).squaredNorm(); };
    auto up = [&](const CVec& th) { return q.qp.objective(th) + q.constant + c0; };
    chain.check(1 + std::abs(al(tt)) + dr.lambda_f * msq, up(tt), al(tt), up, al, point);

    // isotropic bound of a random real quadratic form
    BlockPlusRankOne P;
    P.base = BlockDiagonal::from_dense(oracle::random_cmat(rng, M, M));
    P.coef = oracle::cnormal(rng);
    P.u = oracle::random_cvec(rng, M);
    const IsotropicMajorizer mj = realify_and_majorize(P, tt);
    auto form = [&](const CVec& th) { return (th.transpose() * P.apply(th))(0).real(); };
    auto bound = [&](const CVec& th) { return mj.value(th); };
    iso.check(1 + mj.lambda * static_cast<double>(M), mj.value(tt), form(tt), bound, form, point);

    // power-min constraint terms
    in.params.Gamma = RVec::Constant(2, 0.2 + 2 * rng.uniform());
    const auto pd = build_pm_constraint_data(in.ch, in.state.a, in.w, in.params, in.dims);
    for (Index k = 0; k < 2; ++k) {
      const QuarticSurrogate pq = pm_quartic_surrogate(pd, k, tt);
      auto dpq = [&](const CVec& th) { return oracle::dense_pm_quartic(in, k, th); };
      pmq.check(1 + pd.lambda(k) * msq, pq.value(tt), dpq(tt), [&](const CVec& th) { return pq.value(th); }, dpq,
                point);
      const ConvexQuadConstraint cc = build_pm_constraint_surrogate(pd, k, tt);
      auto con = [&](const CVec& th) { return pd.constraint(k, th); };
      pmc.check(1 + std::abs(con(tt)) + pd.lambda(k) * msq, cc.value(tt), con(tt),
                [&](const CVec& th) { return cc.value(th); }, con, point);
    }
  }
  Verdict v;
  v.pass = quartic.ok() && chain.ok() && iso.ok() && pmq.ok() && pmc.ok();
  v.detail = quartic.str("rate-quartic") + "; " + chain.str("theta-step") + "; " + iso.str("isotropic") + "; " +
             pmq.str("pm-quartic") + "; " + pmc.str("pm-convex");
  return v;
}

// ------------------------------------------------------------------- 4

Verdict dense_equivalence() {
  Worst f_err, lam_err, pm_err;
  bool sign_ok = true;
  for (int M : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const int L = (seed % 2 == 0 || M == 3) ? 1 : M / 2;
      auto in = oracle::random_instance(100 * static_cast<std::uint64_t>(M) + seed, 3, 2, M, L);
      CounterRng rng(seed);
      const FpAux aux = oracle::random_aux(rng, 2);
      const auto d = build_sumrate_theta_data(in.ch, in.state.a, in.w, aux, in.params, in.dims);
      const CMat F = oracle::dense_F(in.ch, in.state.a, in.w.W, d.eta_sq);
      lam_err.add(std::abs(d.lambda_f - F.trace().real()) / (1 + d.lambda_f));
      const CVec th = oracle::random_phases(rng, M);
      const CVec v = oracle::lift(th);
      const CVec x = 2.0 * (F * v - d.lambda_f * v);
      const CMat X = Eigen::Map<const CMat>(x.data(), M, M).conjugate();
      const CMat Ft = surrogate_quartic(d, th).Ft.dense();
      // only the symmetric part enters θᵀFθ
      f_err.add((0.5 * (Ft + Ft.transpose()) - 0.5 * (X + X.transpose())).norm() / (1 + X.norm()));
    }
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto in = oracle::random_instance(seed, 4, 3, 8, seed % 2 ? 4 : 2);
    const RVec g = oracle::dense_sinr(in.ch, oracle::dense_psi(in.state), in.w.W, in.params.sigma_sq,
                                      in.params.sigma_z_sq);
    for (double f : {0.9, 1.1}) {
      in.params.Gamma = f * g;
      const auto d = build_pm_constraint_data(in.ch, in.state.a, in.w, in.params, in.dims);
      for (Index k = 0; k < 3; ++k) {
        const double val = d.constraint(k, in.state.theta);
        const double ref = oracle::dense_constraint(in, in.state.theta, k);
        pm_err.add(std::abs(val - ref) / (1 + std::abs(ref)));
        sign_ok = sign_ok && ((val <= 0) == (f < 1));
      }
    }
  }
  Verdict v;
  v.pass = f_err.value <= 1e-10 && lam_err.value <= 1e-10 && pm_err.value <= 1e-9 && sign_ok;
  v.detail = "F_t " + fmt("%.1e", f_err.value) + ", lambda_f " + fmt("%.1e", lam_err.value) + ", pm constraint " +
             fmt("%.1e", pm_err.value) + (sign_ok ? ", thresholds agree" : ", threshold mismatch");
  return v;
}

// ------------------------------------------------------------------- 5

Verdict solver_certification() {
  Worst quad_kkt, box_kkt, socp_kkt, oracle_gap;
  int failures = 0;
  const oracle::QuadClass classes[] = {
      {"free", 0, false}, {"ball", 1, false}, {"ball_ellipse", 2, false}, {"nonneg", 1, true}};
  for (const auto& cls : classes) {
    CounterRng root(0xACCE55 + static_cast<std::uint64_t>(cls.constraints) * 7 + (cls.nonneg ? 1 : 0));
    for (std::uint64_t t = 0; t < 200; ++t) {
      CounterRng rng = root.split(t);
      const QuadMaxProblem p = oracle::random_quad(cls, rng);
      const auto r = solve_quad_max(p);
      if (!r.report.ok()) ++failures;
      quad_kkt.add(oracle::quad_kkt(p, r.w, r.multipliers));
      if (t % 10 == 0 && cls.constraints > 0) {
        const double ref = oracle::quad_max_via_socp(p);
        oracle_gap.add(std::abs(r.report.objective - ref) / (1 + std::abs(ref)));
      }
    }
  }
  CounterRng broot(0xB0C5);
  for (std::uint64_t t = 0; t < 200; ++t) {
    CounterRng rng = broot.split(t);
    const Index Q = 1 + static_cast<Index>(rng.uniform() * 4);
    const Index L = 1 + static_cast<Index>(rng.uniform() * 4);
    const int J = static_cast<int>(rng.uniform() * 4);
    const BoxQcqpProblem p = oracle::random_box(rng, L, Q, J);
    const auto r = solve_box_qcqp_min(p);
    if (!r.report.ok()) ++failures;
    box_kkt.add(oracle::box_kkt(p, r.theta, r.duals, r.disk_duals));
    if (t % 10 == 0 && p.size() <= 8) {
      const double ref = oracle::box_via_socp(p);
      oracle_gap.add(std::abs(r.report.objective - ref) / (1 + std::abs(ref)));
    }
  }
  CounterRng sroot(0x50C9);
  for (std::uint64_t t = 0; t < 200; ++t) {
    CounterRng rng = sroot.split(t);
    const SocpProblem p = oracle::random_socp(rng);
    const auto r = solve_socp(p);
    if (!r.report.ok()) ++failures;
    socp_kkt.add(socp_kkt_residual(p, r.x, r.cone_mu, r.cone_z, r.linear_duals));
    for (const auto& k : p.cones) socp_kkt.add(std::max(0.0, k.lhs(r.x) - k.rhs(r.x)) / k.scale());
  }

  // grid oracles on tiny instances
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(300 + seed);
    QuadMaxProblem p;
    p.x = oracle::random_cvec(rng, 1, 4.0);
    p.Y = CMat::Constant(1, 1, cd(0.2 + rng.uniform(), 0.0));
    p.constraints.push_back(QuadConstraint::norm_ball(0.3 + rng.uniform()));
    const auto r = solve_quad_max(p);
    const double rad = std::sqrt(p.constraints[0].bound);
    auto f = [&](double u, double w) {
      CVec x(1);
      x(0) = cd(u, w);
      return p.objective(x);
    };
    const double best =
        oracle::grid_max(f, [&](double u, double w) { return u * u + w * w <= rad * rad; }, -rad, rad, -rad, rad);
    oracle_gap.add(std::abs(r.report.objective - best));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(400 + seed);
    BoxQcqpProblem p;
    p.Upsilon = BlockDiagonal::identity(1, 1, 0.5 + rng.uniform());
    p.zeta = oracle::random_cvec(rng, 1, 9.0);
    ConvexQuadConstraint c;
    c.Lambda = BlockDiagonal::identity(1, 1);
    const cd centre = 0.5 * oracle::random_in_disk(rng, 1)(0);
    c.beta = CVec::Constant(1, -2.0 * centre);
    c.c = std::norm(centre) - 0.25;  // |θ − centre|² ≤ 0.25
    p.constraints.push_back(c);
    const auto r = solve_box_qcqp_min(p);
    if (!r.report.ok()) ++failures;
    // Convex objective: the minimum is the unconstrained point or lies on
    // one of the two circles, each searched by a refined angle grid.
    auto f = [&](cd z) {
      CVec th(1);
      th(0) = z;
      return p.objective(th);
    };
    auto feas = [&](cd z) {
      CVec th(1);
      th(0) = z;
      return std::norm(z) <= 1 + 1e-12 && c.value(th) <= 1e-12;
    };
    double best = std::numeric_limits<double>::infinity();
    const cd free_min = -p.zeta(0) / (2.0 * p.Upsilon[0](0, 0).real());
    if (feas(free_min)) best = f(free_min);
    for (const auto& [o, rad] : {std::pair<cd, double>{0.0, 1.0}, std::pair<cd, double>{centre, 0.5}}) {
      double lo = 0.0, hi = 2 * std::numbers::pi, step = 1e-3, arg = 0.0, val = std::numeric_limits<double>::infinity();
      for (int level = 0; level < 3; ++level) {
        for (double phi = lo; phi <= hi; phi += step) {
          const cd z = o + std::polar(rad, phi);
          if (feas(z) && f(z) < val) {
            val = f(z);
            arg = phi;
          }
        }
        lo = arg - 2 * step;
        hi = arg + 2 * step;
        step *= 1e-3;
      }
      best = std::min(best, val);
    }
    oracle_gap.add(std::abs(r.report.objective - best));
  }

  Verdict v;
  v.pass = failures == 0 && quad_kkt.value <= 1e-6 && box_kkt.value <= 1e-6 && socp_kkt.value <= 1e-6 &&
           oracle_gap.value <= 1e-4;
  v.detail = "quad_max kkt " + fmt("%.1e", quad_kkt.value) + ", box_qcqp kkt " + fmt("%.1e", box_kkt.value) +
             ", socp kkt " + fmt("%.1e", socp_kkt.value) + ", oracle gap " + fmt("%.1e", oracle_gap.value) +
             ", unsolved " + std::to_string(failures);
  return v;
}

// ------------------------------------------------------------------- 6, 7

struct DeskRuns {
  std::vector<SumRateResult> rate;
  std::vector<PowerMinResult> power;
  std::vector<RVec> gamma;
};

DeskRuns desk_runs(int trials) {
  DeskRuns out;
  out.rate.resize(static_cast<std::size_t>(trials));
  out.power.resize(static_cast<std::size_t>(trials));
  out.gamma.resize(static_cast<std::size_t>(trials));
  harness::ExperimentConfig rc = desk_config();
  harness::ExperimentConfig pc = rc;
  harness::override_preset(pc, "power_vs_gamma");
  harness::parallel_for(2 * trials, workers(), [&](int j) {
    const int t = j % trials;
    const auto i = static_cast<std::size_t>(t);
    if (j < trials) {
      const harness::Scenario s = harness::make_scenario(rc, rc.P_BS, "sub", t);
      out.rate[i] = run_sum_rate_max(s.ch, s.dims, s.params, harness::sumrate_options(rc));
    } else {
      const harness::Scenario s = harness::make_scenario(pc, pc.Gamma, "sub", t);
      out.power[i] = run_power_min(s.ch, s.dims, s.params, harness::powermin_options(pc));
      out.gamma[i] = s.params.Gamma;
    }
  });
  return out;
}

Verdict block_monotonicity(const DeskRuns& runs) {
  Worst rate_drop, power_rise, sinr_short;
  int exempt = 0, checked = 0, infeasible = 0;
  for (std::size_t t = 0; t < 50; ++t) {
    for (const auto& rec : runs.rate[t].trace.outer) {
      const double sl = std::max(1.0, std::abs(rec.f2_aux));
      rate_drop.add(std::max(0.0, rec.f1_old_mu - rec.f1_new_mu) / sl);
      rate_drop.add(std::max(0.0, rec.f2_old_eta - rec.f2_aux) / sl);
      rate_drop.add(std::max(0.0, rec.f2_start - rec.f2_aux) / sl);
      rate_drop.add(std::max(0.0, rec.f2_aux - rec.f2_w) / sl);
      if (rec.theta_over_budget) {
        ++exempt;
      } else {
        rate_drop.add(std::max(0.0, rec.f2_theta - rec.f2_a) / sl);
      }
      ++checked;
    }
    const PowerMinResult& r = runs.power[t];
    if (!r.feasible) {
      ++infeasible;
      continue;
    }
    double prev = r.trace.initial_power;
    for (const auto& rec : r.trace.outer) {
      power_rise.add(std::max(0.0, rec.power_w - rec.power_start) / prev);
      power_rise.add(std::max(0.0, rec.power_theta - rec.power_w) / prev);
      power_rise.add(std::max(0.0, rec.power_a - rec.power_theta) / prev);
      power_rise.add(std::max(0.0, rec.power_a - prev) / prev);
      prev = rec.power_a;
    }
    sinr_short.add(std::max(0.0, -min_sinr_slack(r.sinr, runs.gamma[t])));
  }
  Verdict v;
  v.pass = rate_drop.value <= 1e-6 && power_rise.value <= 1e-6 && sinr_short.value <= 1e-3 && infeasible == 0;
  v.detail = "rate drop " + fmt("%.1e", rate_drop.value) + " over " + std::to_string(checked) +
             " sweeps (a-step after over-budget theta skipped " + std::to_string(exempt) + "), power rise " +
             fmt("%.1e", power_rise.value) + ", sinr shortfall " + fmt("%.1e", sinr_short.value) + ", infeasible " +
             std::to_string(infeasible);
  return v;
}

Verdict convergence(const DeskRuns& runs) {
  const int n = static_cast<int>(runs.rate.size());
  int rate_outer = 0, rate_admm = 0, rate_both = 0, pm_outer = 0, pm_admm = 0, pm_both = 0;
  for (std::size_t t = 0; t < runs.rate.size(); ++t) {
    const SumRateResult& r = runs.rate[t];
    bool admm = true;
    for (const auto& rec : r.trace.outer) admm = admm && rec.admm_converged && rec.admm_residual < 1e-3;
    const bool outer = r.converged && r.iterations <= 30;
    rate_outer += outer;
    rate_admm += admm;
    rate_both += outer && admm;
    const PowerMinResult& p = runs.power[t];
    bool padmm = true;
    for (const auto& rec : p.trace.outer) padmm = padmm && rec.admm_converged && rec.admm_residual < 1e-3;
    const bool pouter = p.converged && p.iterations <= 30;
    pm_outer += pouter;
    pm_admm += padmm;
    pm_both += pouter && padmm;
  }
  Verdict v;
  const int need = (9 * n + 9) / 10;
  v.pass = rate_both >= need && pm_both >= need;
  v.detail = "rate: outer " + std::to_string(rate_outer) + ", admm " + std::to_string(rate_admm) + ", both " +
             std::to_string(rate_both) + "; power: outer " + std::to_string(pm_outer) + ", admm " +
             std::to_string(pm_admm) + ", both " + std::to_string(pm_both) + " of " + std::to_string(n) +
             " (need " + std::to_string(need) + ")";
  return v;
}

// ------------------------------------------------------------------- 8

const harness::AggregateRow* find_row(const harness::ExperimentOutput& o, double sweep, const std::string& metric) {
  for (const auto& a : o.aggregate)
    if (a.metric == metric && std::abs(a.sweep - sweep) <= 1e-12 * std::max(1.0, std::abs(sweep))) return &a;
  return nullptr;
}

// Mean of `hi` exceeds mean of `lo` by more than the combined standard error.
bool beyond_se(const harness::AggregateRow* lo, const harness::AggregateRow* hi, std::string& detail) {
  if (!lo || !hi) {
    detail += " missing";
    return false;
  }
  const double d = hi->mean - lo->mean, se = std::hypot(lo->se, hi->se);
  detail += " " + fmt("%.4g", d) + "/" + fmt("%.2g", se);
  return d > se;
}

harness::ExperimentConfig trend_config(const std::string& preset, const std::vector<double>& sweep) {
  harness::ExperimentConfig c = desk_config();
  const harness::PresetInfo& info = harness::find_preset(preset);
  c.preset = preset;
  c.algorithm = info.algorithm;
  c.axis = info.axis;
  c.sweep = sweep;
  c.architectures = {"sub"};
  c.trials = 50;
  c.workers = workers();
  c.validate();
  return c;
}

Verdict trends() {
  Verdict v;
  int errors = 0;

  const auto ca = trend_config("sumrate_vs_pbs", {harness::dbm_to_watt(20), harness::dbm_to_watt(30),
                                                  harness::dbm_to_watt(40)});
  const auto oa = harness::run_experiment(ca);
  errors += oa.errors;
  std::string da = "(a) rate vs P_BS:";
  bool a = true;
  for (std::size_t i = 0; i + 1 < ca.sweep.size(); ++i)
    a = beyond_se(find_row(oa, ca.sweep[i], "sum_rate"), find_row(oa, ca.sweep[i + 1], "sum_rate"), da) && a;

  auto cb = trend_config("sumrate_vs_L", {4, 8, 16, 32, 64});
  cb.P_BS = harness::dbm_to_watt(30);
  cb.P_RIS_tot = 0.1689;
  cb.validate();
  const auto ob = harness::run_experiment(cb);
  errors += ob.errors;
  std::string db = "(b) L < M over L = M:";
  bool b = false;
  for (double L : {4.0, 8.0, 16.0, 32.0})
    b = beyond_se(find_row(ob, 64.0, "sum_rate"), find_row(ob, L, "sum_rate"), db) || b;

  const auto cc = trend_config("power_vs_gamma", {harness::db_to_linear(0), harness::db_to_linear(5),
                                                  harness::db_to_linear(10)});
  const auto oc = harness::run_experiment(cc);
  errors += oc.errors;
  std::string dc = "(c) power vs Gamma:";
  bool c = true;
  for (std::size_t i = 0; i + 1 < cc.sweep.size(); ++i)
    c = beyond_se(find_row(oc, cc.sweep[i], "total_power"), find_row(oc, cc.sweep[i + 1], "total_power"), dc) && c;

  v.pass = a && b && c && errors == 0;
  v.detail = da + "; " + db + "; " + dc + "; trial errors " + std::to_string(errors);
  return v;
}

int failures = 0;

template <class Fn>
Verdict timed(int id, const char* name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %d %s: %s (%s) [%.1f s]\n", id, name, v.pass ? "PASS" : "FAIL", v.detail.c_str(), s);
  std::fflush(stdout);
  if (!v.pass) ++failures;
  return v;
}

}  // namespace

int main() {
  timed(1, "static-power cutoff", static_power_cutoff);
  timed(2, "FP tightness", fp_tightness);
  timed(3, "majorization", majorization);
  timed(4, "dense-oracle equivalence", dense_equivalence);
  timed(5, "solver certification", solver_certification);
  DeskRuns runs;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    runs = desk_runs(100);
  } catch (const std::exception& e) {
    std::printf("desk runs failed: %s\n", e.what());
  }
  std::printf("desk runs: 100 + 100 trials [%.1f s]\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  const bool have = runs.rate.size() == 100;
  timed(6, "block monotonicity", [&] { return have ? block_monotonicity(runs) : Verdict{false, "no runs"}; });
  timed(7, "convergence", [&] { return have ? convergence(runs) : Verdict{false, "no runs"}; });
  timed(8, "directional trends", trends);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
