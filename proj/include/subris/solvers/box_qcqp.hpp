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

#ifndef SUBRIS_SOLVERS_BOX_QCQP_HPP_
#define SUBRIS_SOLVERS_BOX_QCQP_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "subris/solvers/common.hpp"
#include "subris/types.hpp"

namespace subris {

/// θᴴΛθ + Re{θᴴβ} + c ≤ 0 with Λ Hermitian PSD. An empty β means zero.
struct ConvexQuadConstraint {
  BlockDiagonal Lambda;
  CVec beta;
  double c = 0.0;

  double value(const CVec& theta) const {
    double v = Lambda.quad(theta) + c;
    if (beta.size() > 0) v += theta.dot(beta).real();
    return v;
  }
  CVec gradient(const CVec& theta) const {  // complex form of the real gradient
    CVec g = 2.0 * Lambda.apply(theta);
    if (beta.size() > 0) g += beta;
    return g;
  }
  double scale() const {
    const double q = static_cast<double>(std::max<Index>(Lambda.block_size(), 1));
    double s = std::max(Lambda.max_abs() * q, std::abs(c));
    if (beta.size() > 0) s = std::max(s, beta.cwiseAbs().maxCoeff());
    return s > 1e-300 ? s : 1.0;
  }
};

/// minimize θᴴΥθ + Re{θᴴζ} s.t. convex quadratic constraints and |θ_m| ≤ 1.
struct BoxQcqpProblem {
  BlockDiagonal Upsilon;
  CVec zeta;
  std::vector<ConvexQuadConstraint> constraints;

  Index size() const { return zeta.size(); }
  double objective(const CVec& theta) const {
    return Upsilon.quad(theta) + theta.dot(zeta).real();
  }
};

struct BoxQcqpResult {
  CVec theta;
  RVec duals;       // per quadratic constraint
  RVec disk_duals;  // per coordinate, for |θ_m|² − 1 ≤ 0
  double max_violation = 0.0;  // normalized; > 0 certifies the returned point is infeasible
  SolveReport report;
};

namespace detail {

/// Interleaved realification: entry m of θ maps to (2m, 2m+1) = (Re, Im).
inline RVec realify(const CVec& v) {
  RVec x(2 * v.size());
  for (Index m = 0; m < v.size(); ++m) {
    x(2 * m) = v(m).real();
    x(2 * m + 1) = v(m).imag();
  }
  return x;
}

inline CVec complexify(const RVec& x) {
  CVec v(x.size() / 2);
  for (Index m = 0; m < v.size(); ++m) v(m) = cd(x(2 * m), x(2 * m + 1));
  return v;
}

/// Real symmetric matrix R with xᵀRx = θᴴAθ for Hermitian A.
inline RMat realify_block(const CMat& A) {
  const Index q = A.rows();
  RMat R(2 * q, 2 * q);
  for (Index a = 0; a < q; ++a)
    for (Index b = 0; b < q; ++b) {
      const cd v = A(a, b);
      R(2 * a, 2 * b) = v.real();
      R(2 * a, 2 * b + 1) = -v.imag();
      R(2 * a + 1, 2 * b) = v.imag();
      R(2 * a + 1, 2 * b + 1) = v.real();
    }
  return R;
}

inline std::vector<RMat> realify_blocks(const BlockDiagonal& A) {
  std::vector<RMat> out;
  out.reserve(A.blocks.size());
  for (const auto& b : A.blocks) out.push_back(realify_block(b));
  return out;
}

/// Block-diagonal SPD system with per-block Cholesky factors.
class BlockCholesky {
 public:
  bool factor(const std::vector<RMat>& blocks) {
    llt_.clear();
    offsets_.clear();
    Index off = 0;
    for (const auto& b : blocks) {
      llt_.emplace_back(b);
      if (llt_.back().info() != Eigen::Success) return false;
      offsets_.push_back(off);
      off += b.rows();
    }
    n_ = off;
    return true;
  }

  RVec solve(const RVec& v) const {
    RVec out(n_);
    for (std::size_t l = 0; l < llt_.size(); ++l) {
      const Index s = llt_[l].rows();
      out.segment(offsets_[l], s) = llt_[l].solve(v.segment(offsets_[l], s));
    }
    return out;
  }

 private:
  std::vector<Eigen::LLT<RMat>> llt_;
  std::vector<Index> offsets_;
  Index n_ = 0;
};

/// (B + V Vᵀ)⁻¹ r by the Woodbury identity.
inline RVec woodbury_solve(const BlockCholesky& B, const RMat& V, const RVec& r) {
  RVec y = B.solve(r);
  if (V.cols() == 0) return y;
  RMat W(V.rows(), V.cols());
  for (Index j = 0; j < V.cols(); ++j) W.col(j) = B.solve(V.col(j));
  RMat C = RMat::Identity(V.cols(), V.cols()) + V.transpose() * W;
  return y - W * C.ldlt().solve(V.transpose() * y);
}

/// Largest α with a α² + b α + c < 0 kept for α ∈ [0, α*), given c < 0.
inline double max_step_quadratic(double a, double b, double c) {
  if (a <= 0 && b <= 0) return std::numeric_limits<double>::infinity();
  if (std::abs(a) < 1e-300) return b > 0 ? -c / b : std::numeric_limits<double>::infinity();
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return std::numeric_limits<double>::infinity();
  const double sq = std::sqrt(disc);
  // positive root of a α² + b α + c, computed stably
  const double qv = -0.5 * (b + std::copysign(sq, b));
  double r1 = qv / a;
  double r2 = (qv != 0.0) ? c / qv : std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (double r : {r1, r2})
    if (r > 0 && r < best) best = r;
  return best;
}

/// Shared log-barrier machinery. In phase I an extra scalar σ is appended
/// (variable index 2M) and constraint j reads f_j(θ)/s_j − σ ≤ 0.
class BarrierEngine {
 public:
  BarrierEngine(const BoxQcqpProblem& p, bool phase_one)
      : p_(p), phase_one_(phase_one), M_(p.size()), J_(static_cast<Index>(p.constraints.size())) {
    ups_blocks_ = realify_blocks(p.Upsilon);
    for (const auto& c : p.constraints) {
      lam_blocks_.push_back(realify_blocks(c.Lambda));
      cscale_.push_back(phase_one ? c.scale() : 1.0);
    }
    q_ = p.Upsilon.block_size();
    obj_scale_ = std::max(p.Upsilon.max_abs() * static_cast<double>(q_),
                          p.zeta.size() > 0 ? p.zeta.cwiseAbs().maxCoeff() : 0.0);
    if (!(obj_scale_ > 1e-300)) obj_scale_ = 1.0;
  }

  double obj_scale() const { return obj_scale_; }

  // Constraint slacks s_j = −(f_j/scale_j − σ) and disk slacks r_m.
  bool slacks(const CVec& th, double sigma, RVec& s, RVec& r) const {
    s.resize(J_);
    r.resize(M_);
    for (Index j = 0; j < J_; ++j) {
      s(j) = -(p_.constraints[static_cast<std::size_t>(j)].value(th) / cscale_[static_cast<std::size_t>(j)] -
               (phase_one_ ? sigma : 0.0));
      if (!(s(j) > 0)) return false;
    }
    for (Index m = 0; m < M_; ++m) {
      r(m) = 1.0 - std::norm(th(m));
      if (!(r(m) > 0)) return false;
    }
    return true;
  }

  double phi(double t, const CVec& th, double sigma, bool& ok) const {
    RVec s, r;
    ok = slacks(th, sigma, s, r);
    if (!ok) return std::numeric_limits<double>::infinity();
    double v = phase_one_ ? t * sigma : t * p_.objective(th) / obj_scale_;
    v -= s.array().log().sum() + r.array().log().sum();
    if (phase_one_) {
      if (!(sigma_max_ - sigma > 0)) {
        ok = false;
        return std::numeric_limits<double>::infinity();
      }
      v -= std::log(sigma_max_ - sigma);
    }
    return v;
  }

  void set_sigma_max(double v) { sigma_max_ = v; }

  /// One damped Newton step on the barrier function at parameter t.
  /// Returns the Newton decrement squared; negative on numerical failure.
  double newton_step(double t, CVec& th, double& sigma) const {
    RVec s, r;
    if (!slacks(th, sigma, s, r)) return -1.0;
    const Index n = 2 * M_ + (phase_one_ ? 1 : 0);
    const double tt = phase_one_ ? 0.0 : t / obj_scale_;

    RVec grad = RVec::Zero(n);
    if (!phase_one_) grad.head(2 * M_) = tt * realify(2.0 * p_.Upsilon.apply(th) + p_.zeta);
    else grad(2 * M_) = t + 1.0 / (sigma_max_ - sigma);

    std::vector<RMat> blocks;
    blocks.reserve(ups_blocks_.size() + 1);
    for (const auto& b : ups_blocks_) blocks.push_back(2.0 * tt * b);
    RMat V(n, J_);
    for (Index j = 0; j < J_; ++j) {
      const auto& c = p_.constraints[static_cast<std::size_t>(j)];
      const double sc = cscale_[static_cast<std::size_t>(j)];
      RVec gj = RVec::Zero(n);
      gj.head(2 * M_) = realify(c.gradient(th)) / sc;
      if (phase_one_) gj(2 * M_) = -1.0;
      grad += gj / s(j);
      V.col(j) = gj / s(j);
      const auto& lb = lam_blocks_[static_cast<std::size_t>(j)];
      const double w = 2.0 / (sc * s(j));
      for (std::size_t l = 0; l < blocks.size(); ++l) blocks[l] += w * lb[l];
    }
    for (Index m = 0; m < M_; ++m) {
      const double x = th(m).real(), y = th(m).imag();
      grad(2 * m) += 2.0 * x / r(m);
      grad(2 * m + 1) += 2.0 * y / r(m);
      RMat& blk = blocks[static_cast<std::size_t>(m / q_)];
      const Index o = 2 * (m % q_);
      const double rr = r(m) * r(m);
      blk(o, o) += 2.0 / r(m) + 4.0 * x * x / rr;
      blk(o + 1, o + 1) += 2.0 / r(m) + 4.0 * y * y / rr;
      blk(o, o + 1) += 4.0 * x * y / rr;
      blk(o + 1, o) += 4.0 * x * y / rr;
    }
    if (phase_one_) {
      const double d = sigma_max_ - sigma;
      blocks.push_back(RMat::Constant(1, 1, 1.0 / (d * d)));
    }
    BlockCholesky chol;
    if (!chol.factor(blocks)) return -1.0;
    const RVec dz = -woodbury_solve(chol, V, grad);
    const double dec2 = -grad.dot(dz);
    if (!std::isfinite(dec2)) return -1.0;

    // largest feasible step along dz
    const CVec dth = complexify(dz.head(2 * M_));
    const double dsig = phase_one_ ? dz(2 * M_) : 0.0;
    double amax = std::numeric_limits<double>::infinity();
    for (Index m = 0; m < M_; ++m) {
      const double a = std::norm(dth(m));
      const double b = 2.0 * (std::conj(th(m)) * dth(m)).real();
      amax = std::min(amax, max_step_quadratic(a, b, -r(m)));
    }
    for (Index j = 0; j < J_; ++j) {
      const auto& c = p_.constraints[static_cast<std::size_t>(j)];
      const double sc = cscale_[static_cast<std::size_t>(j)];
      const double a = c.Lambda.quad(dth) / sc;
      const double b = realify(c.gradient(th)).dot(dz.head(2 * M_)) / sc - dsig;
      amax = std::min(amax, max_step_quadratic(a, b, -s(j)));
    }
    if (phase_one_ && dsig > 0) amax = std::min(amax, (sigma_max_ - sigma) / dsig);

    double alpha = std::min(1.0, 0.99 * amax);
    if (std::sqrt(std::max(dec2, 0.0)) < 0.2) {
      th += alpha * dth;
      sigma += alpha * dsig;
      return dec2;
    }
    bool ok = true;
    const double f0 = phi(t, th, sigma, ok);
    for (int ls = 0; ls < 80; ++ls) {
      const CVec tn = th + alpha * dth;
      const double sn = sigma + alpha * dsig;
      bool okn = true;
      const double f1 = phi(t, tn, sn, okn);
      if (okn && f1 <= f0 - 0.25 * alpha * dec2) {
        th = tn;
        sigma = sn;
        return dec2;
      }
      alpha *= 0.5;
    }
    return -1.0;
  }

  double max_normalized_violation(const CVec& th) const {
    double v = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < J_; ++j) {
      const auto& c = p_.constraints[static_cast<std::size_t>(j)];
      v = std::max(v, c.value(th) / c.scale());
    }
    return v;
  }

 private:
  const BoxQcqpProblem& p_;
  bool phase_one_;
  Index M_;
  Index J_;
  Index q_ = 1;
  std::vector<RMat> ups_blocks_;
  std::vector<std::vector<RMat>> lam_blocks_;
  std::vector<double> cscale_;
  double obj_scale_ = 1.0;
  double sigma_max_ = 0.0;
};

}  // namespace detail

namespace detail {

/// Multiplier recovery on the final iterate: near-active disks and
/// constraints get least-squares multipliers from the stationarity
/// condition, which is far more accurate than t⁻¹/slack once slacks reach
/// round-off. The disk directions are eliminated coordinatewise first.
inline void refine_box_duals(const BoxQcqpProblem& p, const CVec& th, const RVec& s, const RVec& r,
                             RVec& mu, RVec& kap) {
  const Index M = p.size();
  const Index J = static_cast<Index>(p.constraints.size());
  const double act = 1e-6;
  std::vector<bool> disk_active(static_cast<std::size_t>(M));
  for (Index m = 0; m < M; ++m) disk_active[static_cast<std::size_t>(m)] = r(m) <= act && std::abs(th(m)) > 0;
  auto project = [&](CVec v) {
    for (Index m = 0; m < M; ++m)
      if (disk_active[static_cast<std::size_t>(m)]) {
        const cd u = th(m) / std::abs(th(m));
        v(m) -= (std::conj(u) * v(m)).real() * u;
      }
    return v;
  };
  CVec g0 = 2.0 * p.Upsilon.apply(th) + p.zeta;
  std::vector<Index> active;
  for (Index j = 0; j < J; ++j) {
    const double sc = p.constraints[static_cast<std::size_t>(j)].scale();
    if (s(j) <= act * sc) active.push_back(j);
    else g0 += mu(j) * p.constraints[static_cast<std::size_t>(j)].gradient(th);
  }
  if (!active.empty()) {
    const Index A = static_cast<Index>(active.size());
    RMat Gm(2 * M, A);
    for (Index a = 0; a < A; ++a)
      Gm.col(a) = realify(project(p.constraints[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])].gradient(th)));
    const RVec rhs = -realify(project(g0));
    RVec lam = Gm.colPivHouseholderQr().solve(rhs);
    for (Index a = 0; a < A; ++a) {
      mu(active[static_cast<std::size_t>(a)]) = std::max(lam(a), 0.0);
      g0 += std::max(lam(a), 0.0) * p.constraints[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])].gradient(th);
    }
  }
  for (Index m = 0; m < M; ++m)
    if (disk_active[static_cast<std::size_t>(m)]) {
      const cd u = th(m) / std::abs(th(m));
      kap(m) = std::max(0.0, -(std::conj(u) * g0(m)).real() / (2.0 * std::abs(th(m))));
    }
}

}  // namespace detail

/// Worst of relative stationarity, complementarity, primal and dual
/// violation for a candidate (θ, duals, disk duals).
inline double box_qcqp_kkt_residual(const BoxQcqpProblem& p, const CVec& theta, const RVec& duals,
                                    const RVec& disk_duals) {
  const Index M = p.size();
  const double ups_mag = p.Upsilon.max_abs() * static_cast<double>(std::max<Index>(p.Upsilon.block_size(), 1));
  const double zeta_mag = p.zeta.cwiseAbs().maxCoeff();
  const double gscale = detail::safe_scale(std::max({(2.0 * p.Upsilon.apply(theta)).norm(), p.zeta.norm(), ups_mag, zeta_mag}));
  const double oscale = detail::safe_scale(std::max({std::abs(p.objective(theta)), ups_mag, zeta_mag}));
  CVec g = 2.0 * p.Upsilon.apply(theta) + p.zeta;
  double res = 0.0;
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    const auto& c = p.constraints[j];
    const double lam = duals(static_cast<Index>(j));
    g += lam * c.gradient(theta);
    const double f = c.value(theta);
    res = std::max(res, std::max(0.0, -lam));
    res = std::max(res, std::max(0.0, f) / c.scale());
    res = std::max(res, lam * std::abs(f) / oscale);
  }
  for (Index m = 0; m < M; ++m) {
    const double kap = disk_duals(m);
    g(m) += 2.0 * kap * theta(m);
    const double cm = std::norm(theta(m)) - 1.0;
    res = std::max(res, std::max(0.0, -kap));
    res = std::max(res, std::max(0.0, cm));
    res = std::max(res, kap * std::abs(cm) / oscale);
  }
  res = std::max(res, g.norm() / gscale);
  return res;
}

/// Log-barrier interior-point method over the interleaved real variable.
/// The Hessian is block diagonal (one 2Q x 2Q block per amplifier, with the
/// disk barriers folded in) plus one rank-one term per quadratic
/// constraint, handled by Woodbury. A phase-I problem on the normalized
/// maximum violation runs first when the start point is not strictly
/// feasible.
inline BoxQcqpResult solve_box_qcqp_min(const BoxQcqpProblem& p, const SolverOptions& opts = {},
                                        const CVec* start = nullptr) {
  const Index M = p.size();
  require(p.Upsilon.size() == M, "solve_box_qcqp_min: Upsilon size mismatch");
  for (const auto& c : p.constraints) {
    require(c.Lambda.size() == M && c.Lambda.block_size() == p.Upsilon.block_size(),
            "solve_box_qcqp_min: constraint layout mismatch");
    require(c.beta.size() == 0 || c.beta.size() == M, "solve_box_qcqp_min: beta size mismatch");
  }
  const Index J = static_cast<Index>(p.constraints.size());
  const double m_count = static_cast<double>(J + M);
  const double gap_tol = 1e-10;
  const double newton_tol = 1e-11;

  BoxQcqpResult res;
  res.duals = RVec::Zero(J);
  res.disk_duals = RVec::Zero(M);
  int iters = 0;

  auto strictly_feasible = [&](const CVec& x) {
    for (const auto& c : p.constraints)
      if (!(c.value(x) < 0)) return false;
    return true;
  };

  // Phase I on the normalized maximum violation from one start. The
  // barrier weight is matched to the initial slack.
  auto phase_one = [&](CVec& x) {
    detail::BarrierEngine eng(p, true);
    const double v0 = eng.max_normalized_violation(x);
    double sigma = v0 + 0.1 * (std::abs(v0) + 1e-9);
    eng.set_sigma_max(sigma + 10.0 * (std::abs(sigma) + 1.0));
    double t = std::max(1.0, 1.0 / (sigma - v0));
    const int budget = iters + 4 * opts.max_iter;
    while (iters < budget) {
      bool centered = false;
      for (int k = 0; k < 60 && iters < budget; ++k) {
        const double dec2 = eng.newton_step(t, x, sigma);
        ++iters;
        if (dec2 < 0) break;
        if (eng.max_normalized_violation(x) < 0) return true;
        if (dec2 / 2 <= newton_tol) {
          centered = true;
          break;
        }
      }
      // the duality bound σ − m/t ≤ σ* only holds on the central path
      if (centered && sigma - m_count / t > 0) return false;
      if (m_count / t < gap_tol) return false;
      t *= opts.barrier_mu;
    }
    return false;
  };

  // Starts: the warm start pulled inside the disk by decreasing margins
  // (tight constraints at a unit-modulus point leave only a thin interior,
  // and the barrier is badly conditioned right at the boundary), then the
  // origin. Infeasibility is reported only when every start fails.
  std::vector<CVec> starts;
  if (start != nullptr) {
    require(start->size() == M, "solve_box_qcqp_min: start size mismatch");
    for (double delta : {1e-3, 1e-6, 1e-9}) {
      CVec cand = *start;
      for (Index m = 0; m < M; ++m)
        if (std::abs(cand(m)) >= 1.0 - delta) cand(m) *= (1.0 - delta) / std::abs(cand(m));
      starts.push_back(cand);
    }
  }
  starts.push_back(CVec::Zero(M));

  CVec th;
  bool found = false;
  for (const CVec& s0 : starts)
    if (strictly_feasible(s0)) {
      th = s0;
      found = true;
      break;
    }
  if (!found) {
    detail::BarrierEngine probe(p, true);
    double least = std::numeric_limits<double>::infinity();
    CVec closest;
    for (const CVec& s0 : starts) {
      CVec x = s0;
      if (phase_one(x)) {
        th = x;
        found = true;
        break;
      }
      const double v = probe.max_normalized_violation(x);
      if (v < least) {
        least = v;
        closest = x;
      }
    }
    if (!found) {
      res.theta = closest;
      res.max_violation = least;
      res.report.status = SolveStatus::Infeasible;
      res.report.iterations = iters;
      res.report.objective = p.objective(closest);
      res.report.kkt_residual = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  detail::BarrierEngine eng(p, false);
  double t = 1.0;
  double sigma = 0.0;
  // Last centered iterate: centering can stall once the slacks approach
  // round-off, and the duals are only meaningful on the central path.
  CVec th_c = th;
  double t_c = 0.0;
  for (;;) {
    bool centered = false;
    for (int k = 0; k < 80 && iters < 4 * opts.max_iter; ++k) {
      const double dec2 = eng.newton_step(t, th, sigma);
      ++iters;
      if (dec2 < 0) break;
      if (dec2 / 2 <= newton_tol) {
        centered = true;
        break;
      }
    }
    if (!centered) break;
    th_c = th;
    t_c = t;
    if (m_count / t < gap_tol) break;
    t *= opts.barrier_mu;
  }
  if (t_c > 0) {
    th = th_c;
    t = t_c;
  }

  RVec s, r;
  eng.slacks(th, 0.0, s, r);
  const double scale = eng.obj_scale();
  for (Index j = 0; j < J; ++j) res.duals(j) = scale / (t * s(j));
  for (Index m = 0; m < M; ++m) res.disk_duals(m) = scale / (t * r(m));
  res.theta = th;
  res.max_violation = J > 0 ? eng.max_normalized_violation(th) : -1.0;
  res.report.iterations = iters;
  res.report.objective = p.objective(th);
  res.report.kkt_residual = box_qcqp_kkt_residual(p, th, res.duals, res.disk_duals);
  {
    RVec mu = res.duals, kap = res.disk_duals;
    detail::refine_box_duals(p, th, s, r, mu, kap);
    const double refined = box_qcqp_kkt_residual(p, th, mu, kap);
    if (refined < res.report.kkt_residual) {
      res.duals = mu;
      res.disk_duals = kap;
      res.report.kkt_residual = refined;
    }
  }
  res.report.status = res.report.kkt_residual <= opts.kkt_tol ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return res;
}

}  // namespace subris

#endif  // SUBRIS_SOLVERS_BOX_QCQP_HPP_
