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

#include <cmath>

#include <gtest/gtest.h>

#include "oracle/dense_oracle.hpp"
#include "subris/model.hpp"

namespace subris {
namespace {

TEST(SystemDims, RejectsNonDividingL) {
  SystemDims d{16, 4, 256, 48};
  EXPECT_THROW(d.validate(), Error);
  d.L = 64;
  EXPECT_NO_THROW(d.validate());
}

TEST(SystemParams, FullyConnectedStaticPower) {
  SystemDims d{16, 4, 256, 256};
  SystemParams p;
  // 512 circuits at 7 dBm each.
  EXPECT_NEAR(p.static_ris_power(d), 512 * std::pow(10.0, 0.7) / 1000.0, 1e-3);
  p.P_RIS_tot = std::pow(10.0, 0.4);
  EXPECT_FALSE(p.ris_budget_feasible(d));
  p.P_RIS_tot = std::pow(10.0, 0.415);
  EXPECT_TRUE(p.ris_budget_feasible(d));
}

TEST(ReflectionOperator, MatchesDenseProduct) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int L = (seed % 2 == 0) ? 2 : 4;
    auto in = oracle::random_instance(seed, 3, 2, 8, L);
    ReflectionOperator op(in.state, in.dims);
    const CMat Psi = oracle::dense_psi(in.state);
    CounterRng rng(seed + 99);
    const CVec x = oracle::random_cvec(rng, 8);
    EXPECT_LT((op.apply(x) - Psi * x).norm(), 1e-12 * (1 + (Psi * x).norm()));
    EXPECT_LT((op.apply_adjoint(x) - Psi.adjoint() * x).norm(), 1e-12 * (1 + x.norm() * Psi.norm()));
    for (Index l = 0; l < L; ++l) {
      const Index q = 8 / L;
      EXPECT_LT((op.psi_block(l) - Psi.block(l * q, l * q, q, q)).norm(), 1e-13);
    }
    EXPECT_NEAR(op.frobenius_sq(), Psi.squaredNorm(), 1e-10);
    EXPECT_NEAR(ris_frobenius_power(op), Psi.squaredNorm(), 1e-10);
    EXPECT_NEAR(ris_frobenius_power(op), oracle::dense_xi(in.state.a, 8).squaredNorm(), 1e-10);
  }
}

TEST(ReflectionOperator, FrobeniusScalesQuadraticallyInA) {
  auto in = oracle::random_instance(7, 2, 1, 12, 3);
  ReflectionOperator op(in.state, in.dims);
  RisState s2 = in.state;
  s2.a *= 2.5;
  EXPECT_NEAR(ReflectionOperator(s2, in.dims).frobenius_sq(), 6.25 * op.frobenius_sq(), 1e-10);
}

TEST(ReflectionOperator, DiagonalExtractionIdentities) {
  auto in = oracle::random_instance(3, 4, 2, 6, 3);
  const CVec& th = in.state.theta;
  const CVec h = in.ch.h_r.col(0);
  const CVec g = in.ch.G * in.w.W.col(1);
  // h_rᴴ diag(θ) = θᵀ diag(h_r*), diag(θ) g = diag(g) θ.
  const CVec lhs1 = (h.adjoint() * CMat(th.asDiagonal())).transpose();
  const CVec rhs1 = (th.transpose() * CMat(h.conjugate().asDiagonal())).transpose();
  EXPECT_LT((lhs1 - rhs1).norm(), 1e-14);
  EXPECT_LT((th.asDiagonal() * g - g.asDiagonal() * th).norm(), 1e-14);
}

TEST(Sinr, MatchesDenseOracleAndPhaseInvariance) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    auto in = oracle::random_instance(seed, 4, 3, 8, 4);
    ReflectionOperator op(in.state, in.dims);
    const RVec g = sinr_all(in.ch, op, in.w, in.params);
    const RVec ref = oracle::dense_sinr(in.ch, oracle::dense_psi(in.state), in.w.W, in.params.sigma_sq,
                                        in.params.sigma_z_sq);
    for (Index k = 0; k < 3; ++k) {
      EXPECT_NEAR(g(k), ref(k), 1e-11 * (1 + ref(k)));
      EXPECT_NEAR(sinr(k, in.ch, op, in.w, in.params), ref(k), 1e-11 * (1 + ref(k)));
    }
    Precoder rot = in.w;
    rot.W.col(1) *= std::polar(1.0, 1.234);
    EXPECT_LT((sinr_all(in.ch, op, rot, in.params) - g).norm(), 1e-11 * (1 + g.norm()));
  }
}

TEST(Power, RisOutputPowerMatchesDense) {
  auto in = oracle::random_instance(5, 4, 2, 8, 2);
  ReflectionOperator op(in.state, in.dims);
  const CMat Psi = oracle::dense_psi(in.state);
  const double ref = (Psi * in.ch.G * in.w.W).squaredNorm() + Psi.squaredNorm() * in.params.sigma_z_sq;
  EXPECT_NEAR(ris_output_power(in.ch, op, in.w, in.params), ref, 1e-10 * ref);
  EXPECT_NEAR(ris_power(in.ch, op, in.w, in.params, in.dims),
              ref / in.params.nu2 + in.params.static_ris_power(in.dims), 1e-10 * ref);
  EXPECT_NEAR(bs_power(in.w, in.params), in.w.W.squaredNorm() * 1.1 + in.params.W_BS, 1e-12);
}

TEST(Sinr, ZeroPrecoderGivesZero) {
  auto in = oracle::random_instance(8, 3, 2, 4, 2);
  in.w.W.setZero();
  ReflectionOperator op(in.state, in.dims);
  EXPECT_EQ(sinr_all(in.ch, op, in.w, in.params).norm(), 0.0);
}

TEST(Precoder, StackRoundTrip) {
  auto in = oracle::random_instance(9, 3, 2, 4, 2);
  const CVec s = in.w.stacked();
  EXPECT_EQ(s.segment(3, 3), in.w.W.col(1));
  EXPECT_EQ(Precoder::from_stacked(s, 3, 2).W, in.w.W);
}

}  // namespace
}  // namespace subris
