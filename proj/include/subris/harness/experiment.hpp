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

#ifndef SUBRIS_HARNESS_EXPERIMENT_HPP_
#define SUBRIS_HARNESS_EXPERIMENT_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "subris/channel.hpp"
#include "subris/harness/config.hpp"
#include "subris/harness/csv.hpp"
#include "subris/powermin.hpp"
#include "subris/sumrate.hpp"

namespace subris::harness {

struct ResultRow {
  std::string preset;
  std::string architecture;
  double sweep = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  std::string status;  // ok | ris_infeasible | infeasible | error: <message>
  double wall_ms = 0.0;
};

struct AggregateRow {
  std::string architecture;
  double sweep = 0.0;
  std::string metric;
  int n = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregate;
  std::map<int, CsvTable> traces;  // trial -> per-iteration rows
  int errors = 0;
};

/// One realization: dimensions, constants and channels of a sweep point,
/// architecture and trial.
struct Scenario {
  SystemDims dims;
  SystemParams params;
  ChannelSet ch;
  std::uint64_t seed = 0;
};

/// Seed of a trial; shared by every sweep point and architecture, so that
/// points are compared on the same draws.
inline std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return CounterRng(base).split(static_cast<std::uint64_t>(trial)).next_u64();
}

inline Scenario make_scenario(const ExperimentConfig& c, double sweep, const std::string& arch, int trial) {
  ExperimentConfig e = c;
  switch (c.axis) {
    case Axis::TransmitPower: e.P_BS = sweep; break;
    case Axis::RisBudget: e.P_RIS_tot = sweep; break;
    case Axis::Amplifiers: e.L = static_cast<int>(sweep); break;
    case Axis::Users: e.K = static_cast<int>(sweep); break;
    case Axis::UserDistance: e.user_x = sweep; break;
    case Axis::Target: e.Gamma = sweep; break;
  }
  if (arch == "fully") e.L = e.M;
  Scenario s;
  s.dims = SystemDims{e.N, e.K, e.M, e.L};
  s.params.P_BS = e.P_BS;
  s.params.P_RIS_tot = e.P_RIS_tot;
  s.params.W_BS = e.W_BS;
  s.params.W_PS = e.W_PS;
  s.params.W_PA = e.W_PA;
  s.params.nu1 = e.nu1;
  s.params.nu2 = e.nu2;
  s.params.sigma_sq = RVec::Constant(e.K, e.sigma_sq);
  s.params.sigma_z_sq = e.sigma_z_sq;
  s.params.Gamma = RVec::Constant(e.K, e.Gamma);
  s.seed = trial_seed(c.seed, trial);
  CounterRng rng(s.seed);
  Geometry g;
  g.ris_pos = Point2{e.ris_x, e.ris_y};
  g.user_center_x = e.user_x;
  g.user_radius = e.user_radius;
  place_users(g, e.K, rng);
  s.ch = generate_channels(s.dims, g, e.path_loss, rng);
  return s;
}

inline SumRateOptions sumrate_options(const ExperimentConfig& c) {
  SumRateOptions o;
  o.outer_tol = c.outer_tol;
  o.max_outer = c.rate_max_outer;
  o.rho = c.rho;
  o.admm.tol = c.admm_tol;
  o.admm.max_iter = c.admm_max_iter;
  return o;
}

inline PowerMinOptions powermin_options(const ExperimentConfig& c) {
  PowerMinOptions o;
  o.outer_tol = c.outer_tol;
  o.max_outer = c.power_max_outer;
  o.rho = c.rho;
  o.admm.tol = c.admm_tol;
  o.admm.max_iter = c.admm_max_iter;
  return o;
}

inline std::vector<std::string> trace_header(Algorithm a) {
  if (a == Algorithm::SumRate)
    return {"architecture", "sweep", "iteration", "f2", "sum_rate", "admm_iterations", "admm_residual"};
  return {"architecture", "sweep", "iteration", "total_power", "min_sinr_slack", "admm_iterations", "admm_residual"};
}

namespace detail {

struct Metric {
  std::string name;
  double value;
};

struct JobResult {
  std::vector<Metric> metrics;
  std::string status = "ok";
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  std::vector<std::vector<std::string>> trace;
};

inline JobResult run_job(const ExperimentConfig& c, double sweep, const std::string& arch, int trial) {
  JobResult r;
  const auto t0 = std::chrono::steady_clock::now();
  const bool trace = c.preset == "convergence_trace";
  const std::string sw = format_number(sweep);
  try {
    const Scenario s = make_scenario(c, sweep, arch, trial);
    r.seed = s.seed;
    if (c.algorithm == Algorithm::SumRate) {
      const SumRateResult res = run_sum_rate_max(s.ch, s.dims, s.params, sumrate_options(c));
      SumRateOptions base = sumrate_options(c);
      base.disable_ris = true;
      const SumRateResult none = run_sum_rate_max(s.ch, s.dims, s.params, base);
      const ReflectionOperator op(res.state, s.dims);
      r.status = res.ris_infeasible ? "ris_infeasible" : "ok";
      r.metrics = {{"sum_rate", res.sum_rate},
                   {"sum_rate_initial", res.trace.initial_sum_rate},
                   {"sum_rate_no_ris", none.sum_rate},
                   {"iterations", static_cast<double>(res.iterations)},
                   {"converged", res.converged ? 1.0 : 0.0},
                   {"bs_transmit_power", res.w.total_power()},
                   {"ris_output_power", ris_output_power(s.ch, op, res.w, s.params)}};
      if (trace) {
        r.trace.push_back({arch, sw, "0", format_number(res.trace.initial_sum_rate),
                           format_number(res.trace.initial_sum_rate), "0", "0"});
        for (std::size_t i = 0; i < res.trace.outer.size(); ++i) {
          const auto& o = res.trace.outer[i];
          r.trace.push_back({arch, sw, std::to_string(i + 1), format_number(o.f2_a), format_number(o.sum_rate),
                             std::to_string(o.admm_iterations), format_number(o.admm_residual)});
        }
      }
    } else {
      const PowerMinResult res = run_power_min(s.ch, s.dims, s.params, powermin_options(c));
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.status = res.feasible ? "ok" : "infeasible";
      const bool f = res.feasible;
      r.metrics = {{"total_power", f ? res.total_power : nan},
                   {"bs_power", f ? res.bs_power : nan},
                   {"ris_power", f ? res.ris_power : nan},
                   {"iterations", static_cast<double>(res.iterations)},
                   {"converged", res.converged ? 1.0 : 0.0},
                   {"min_sinr_slack", f ? min_sinr_slack(res.sinr, s.params.Gamma) : nan}};
      if (trace && f) {
        r.trace.push_back({arch, sw, "0", format_number(res.trace.initial_power), "nan", "0", "0"});
        for (std::size_t i = 0; i < res.trace.outer.size(); ++i) {
          const auto& o = res.trace.outer[i];
          r.trace.push_back({arch, sw, std::to_string(i + 1), format_number(o.power_a),
                             format_number(o.min_sinr_slack), std::to_string(o.admm_iterations),
                             format_number(o.admm_residual)});
        }
      }
    }
  } catch (const std::exception& e) {
    r.status = std::string("error: ") + e.what();
    r.metrics.clear();
    r.trace.clear();
  }
  if (c.timing)
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Runs fn(0..n-1) on up to `workers` threads; fn must only write to its
/// own slot.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

/// Mean and standard error per (architecture, sweep, metric) over usable
/// rows, in order of first appearance.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> values;
  std::map<std::tuple<std::string, double, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    if ((r.status != "ok" && r.status != "ris_infeasible") || !std::isfinite(r.value)) continue;
    const auto [it, fresh] = index.try_emplace(std::make_tuple(r.architecture, r.sweep, r.metric), out.size());
    if (fresh) {
      out.push_back(AggregateRow{r.architecture, r.sweep, r.metric, 0, 0.0, 0.0});
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    AggregateRow& a = out[i];
    a.n = static_cast<int>(v.size());
    for (double x : v) a.mean += x / a.n;
    if (a.n < 2) continue;
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.se = std::sqrt(ss / (a.n - 1) / a.n);
  }
  return out;
}

/// Every sweep point x architecture x trial; results are ordered by that
/// index regardless of the worker count.
inline ExperimentOutput run_experiment(const ExperimentConfig& c) {
  c.validate();
  const int P = static_cast<int>(c.sweep.size());
  const int A = static_cast<int>(c.architectures.size());
  const int T = c.trials;
  std::vector<detail::JobResult> jobs(static_cast<std::size_t>(P * A * T));
  parallel_for(P * A * T, c.workers, [&](int j) {
    const int p = j / (A * T), a = (j / T) % A, t = j % T;
    jobs[static_cast<std::size_t>(j)] = detail::run_job(c, c.sweep[static_cast<std::size_t>(p)],
                                                        c.architectures[static_cast<std::size_t>(a)], t);
  });
  ExperimentOutput out;
  for (int j = 0; j < P * A * T; ++j) {
    const int p = j / (A * T), a = (j / T) % A, t = j % T;
    const auto& r = jobs[static_cast<std::size_t>(j)];
    const std::string& arch = c.architectures[static_cast<std::size_t>(a)];
    const double sw = c.sweep[static_cast<std::size_t>(p)];
    if (r.status.rfind("error", 0) == 0) {
      ++out.errors;
      out.rows.push_back(ResultRow{c.preset, arch, sw, t, r.seed, "none",
                                   std::numeric_limits<double>::quiet_NaN(), r.status, r.wall_ms});
    }
    for (const auto& m : r.metrics)
      out.rows.push_back(ResultRow{c.preset, arch, sw, t, r.seed, m.name, m.value, r.status, r.wall_ms});
    if (!r.trace.empty()) {
      auto it = out.traces.try_emplace(t, CsvTable(trace_header(c.algorithm))).first;
      for (const auto& row : r.trace) it->second.add(row);
    }
  }
  out.aggregate = aggregate(out.rows);
  return out;
}

inline CsvTable results_table(const ExperimentOutput& o) {
  CsvTable t({"preset", "architecture", "sweep", "trial", "seed", "metric", "value", "status", "wall_ms"});
  for (const auto& r : o.rows)
    t.add({r.preset, r.architecture, format_number(r.sweep), std::to_string(r.trial), std::to_string(r.seed),
           r.metric, format_number(r.value), r.status, format_number(r.wall_ms)});
  return t;
}

inline CsvTable aggregate_table(const ExperimentConfig& c, const ExperimentOutput& o) {
  CsvTable t({"preset", "architecture", "sweep", "metric", "n", "mean", "se"});
  for (const auto& a : o.aggregate)
    t.add({c.preset, a.architecture, format_number(a.sweep), a.metric, std::to_string(a.n), format_number(a.mean),
           format_number(a.se)});
  return t;
}

/// results.csv, aggregate.csv and trace_<trial>.csv under dir.
inline void write_outputs(const ExperimentConfig& c, const ExperimentOutput& o, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  write_text_file((d / "results.csv").string(), results_table(o).str());
  write_text_file((d / "aggregate.csv").string(), aggregate_table(c, o).str());
  for (const auto& [trial, table] : o.traces)
    write_text_file((d / ("trace_" + std::to_string(trial) + ".csv")).string(), table.str());
}

}  // namespace subris::harness

#endif  // SUBRIS_HARNESS_EXPERIMENT_HPP_
