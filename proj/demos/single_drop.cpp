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

// One channel draw at desk scale: runs the rate maximization and the power
// minimization and prints the per-iteration traces.
//
//   single_drop [seed]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "subris/subris.hpp"

int main(int argc, char** argv) {
  using namespace subris;
  harness::ExperimentConfig c;
  c.N = 8;
  c.K = 2;
  c.M = 64;
  c.L = 16;
  c.W_PS = c.W_PA = harness::dbm_to_watt(7.0) * 64.0 / 256.0;
  c.sweep = {c.P_BS};
  c.seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  c.validate();

  const harness::Scenario s = harness::make_scenario(c, c.P_BS, "sub", 0);
  std::printf("N = %d, K = %d, M = %d, L = %d, P_BS = %.1f dBm, seed %llu\n", c.N, c.K, c.M, c.L,
              10.0 * std::log10(c.P_BS * 1e3), static_cast<unsigned long long>(s.seed));

  const SumRateOptions ro = harness::sumrate_options(c);
  const SumRateResult r = run_sum_rate_max(s.ch, s.dims, s.params, ro);
  SumRateOptions off = ro;
  off.disable_ris = true;
  const SumRateResult n = run_sum_rate_max(s.ch, s.dims, s.params, off);
  std::printf("\nsum rate [bit/s/Hz]\n  initial  %.6f\n", r.trace.initial_sum_rate);
  for (std::size_t i = 0; i < r.trace.outer.size(); ++i)
    std::printf("  iter %2zu  %.6f  (admm %d, residual %.1e)\n", i + 1, r.trace.outer[i].sum_rate,
                r.trace.outer[i].admm_iterations, r.trace.outer[i].admm_residual);
  std::printf("  final %.6f, without surface %.6f, converged %s\n", r.sum_rate, n.sum_rate,
              r.converged ? "yes" : "no");

  const PowerMinResult p = run_power_min(s.ch, s.dims, s.params, harness::powermin_options(c));
  std::printf("\ntotal power [W] for a %.1f dB target\n", 10.0 * std::log10(c.Gamma));
  if (!p.feasible) {
    std::printf("  targets unreachable\n");
    return 0;
  }
  std::printf("  initial  %.6f\n", p.trace.initial_power);
  for (std::size_t i = 0; i < p.trace.outer.size(); ++i)
    std::printf("  iter %2zu  %.6f  (theta %s)\n", i + 1, p.trace.outer[i].power_a,
                p.trace.outer[i].theta_accepted ? "accepted" : "kept");
  std::printf("  final %.6f = BS %.6f + surface %.6f, min SINR / target %.6f\n", p.total_power, p.bs_power,
              p.ris_power, 1.0 + min_sinr_slack(p.sinr, s.params.Gamma));
  return 0;
}
