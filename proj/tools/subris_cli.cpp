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

// Command-line front end: `run` executes a Monte-Carlo sweep, `validate`
// checks a config file.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "subris/subris.hpp"

namespace h = subris::harness;

namespace {

const char* axis_name(h::Axis a) {
  switch (a) {
    case h::Axis::TransmitPower: return "P_BS [W]";
    case h::Axis::RisBudget: return "P_RIS_tot [W]";
    case h::Axis::Amplifiers: return "L";
    case h::Axis::Users: return "K";
    case h::Axis::UserDistance: return "user_x [m]";
    case h::Axis::Target: return "Gamma [linear]";
  }
  return "";
}

void describe(const h::ExperimentConfig& c, std::ostream& os) {
  os << "preset     " << c.preset << " (" << (c.algorithm == h::Algorithm::SumRate ? "sumrate" : "powermin")
     << ")\n";
  os << "sweep      " << axis_name(c.axis) << ":";
  for (double v : c.sweep) os << ' ' << h::format_number(v);
  os << "\ndims       N=" << c.N << " K=" << c.K << " M=" << c.M << " L=" << c.L << "\n";
  os << "arch       ";
  for (const auto& a : c.architectures) os << a << ' ';
  os << "\ntrials     " << c.trials << " seed " << c.seed << " workers " << c.workers << "\n";
  os << "P_BS " << h::format_number(c.P_BS) << " W, P_RIS_tot " << h::format_number(c.P_RIS_tot) << " W, W_BS "
     << h::format_number(c.W_BS) << " W, W_PS " << h::format_number(c.W_PS) << " W, W_PA "
     << h::format_number(c.W_PA) << " W\n";
  os << "sigma_sq " << h::format_number(c.sigma_sq) << " W, sigma_z_sq " << h::format_number(c.sigma_z_sq)
     << " W, Gamma " << h::format_number(c.Gamma) << ", rho " << h::format_number(c.rho) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subris: precoding and reflection design for sub-connected active RIS"};
  app.require_subcommand(1);

  std::string config;
  int trials = 0, workers = 0;
  std::uint64_t seed = 0;
  std::string out, preset;
  bool timing = false;

  auto* run = app.add_subcommand("run", "run the experiment sweep of a config");
  run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--trials", trials, "override trials")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "override seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--preset", preset, "override preset");
  run->add_flag("--timing", timing, "record wall time per trial");

  auto* validate = app.add_subcommand("validate", "parse and check a config");
  validate->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  h::ExperimentConfig c;
  try {
    c = h::load_config(config);
    if (!preset.empty()) h::override_preset(c, preset);
    if (trials > 0) c.trials = trials;
    if (seed_opt->count() > 0) c.seed = seed;
    if (workers > 0) c.workers = workers;
    if (!out.empty()) c.out = out;
    if (timing) c.timing = true;
    c.validate();
  } catch (const subris::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  if (validate->parsed()) {
    describe(c, std::cout);
    std::cout << "ok\n";
    return 0;
  }

  describe(c, std::cerr);
  const h::ExperimentOutput o = h::run_experiment(c);
  try {
    h::write_outputs(c, o, c.out);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 3;
  }
  std::cerr << o.rows.size() << " rows written to " << c.out << "\n";
  if (o.errors > 0) {
    std::cerr << o.errors << " trial(s) failed\n";
    return 1;
  }
  return 0;
}
