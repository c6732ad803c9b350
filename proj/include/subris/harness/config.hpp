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

#ifndef SUBRIS_HARNESS_CONFIG_HPP_
#define SUBRIS_HARNESS_CONFIG_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "subris/channel.hpp"
#include "subris/model.hpp"
#include "subris/types.hpp"

namespace subris::harness {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Algorithm { SumRate, PowerMin };

/// Quantity varied along a sweep.
enum class Axis { TransmitPower, RisBudget, Amplifiers, Users, UserDistance, Target };

struct PresetInfo {
  const char* name;
  Algorithm algorithm;
  Axis axis;
};

inline const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> p = {
      {"sumrate_vs_pbs", Algorithm::SumRate, Axis::TransmitPower},
      {"sumrate_vs_pris", Algorithm::SumRate, Axis::RisBudget},
      {"sumrate_vs_L", Algorithm::SumRate, Axis::Amplifiers},
      {"sumrate_vs_K", Algorithm::SumRate, Axis::Users},
      {"sumrate_vs_x", Algorithm::SumRate, Axis::UserDistance},
      {"power_vs_gamma", Algorithm::PowerMin, Axis::Target},
      {"power_vs_L", Algorithm::PowerMin, Axis::Amplifiers},
      {"power_vs_K", Algorithm::PowerMin, Axis::Users},
      {"power_vs_x", Algorithm::PowerMin, Axis::UserDistance},
      {"convergence_trace", Algorithm::SumRate, Axis::TransmitPower},
  };
  return p;
}

inline const PresetInfo& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (name == p.name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double dbw_to_watt(double dbw) { return std::pow(10.0, dbw / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct ExperimentConfig {
  std::string preset = "sumrate_vs_pbs";
  Algorithm algorithm = Algorithm::SumRate;
  Axis axis = Axis::TransmitPower;
  std::vector<double> sweep;  // in the axis' linear unit
  int trials = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "out";
  bool timing = false;  // wall_ms is 0 unless set, keeping outputs reproducible

  int N = 16;
  int K = 4;
  int M = 256;
  int L = 64;  // amplifiers of the sub-connected architecture
  std::vector<std::string> architectures{"sub", "fully"};

  double P_BS = dbm_to_watt(40.0);
  double P_RIS_tot = dbw_to_watt(4.15);
  double W_BS = dbw_to_watt(6.0);
  double W_PS = dbm_to_watt(7.0);
  double W_PA = dbm_to_watt(7.0);
  double nu1 = 1.0 / 1.1;
  double nu2 = 1.0 / 1.1;
  double sigma_sq = dbm_to_watt(-80.0);
  double sigma_z_sq = dbm_to_watt(-80.0);
  double Gamma = db_to_linear(8.0);

  double user_x = 200.0;
  double user_radius = 10.0;
  double ris_x = 0.0;
  double ris_y = 50.0;
  PathLossParams path_loss{};

  double rho = 1.0;
  double outer_tol = 1e-4;
  int rate_max_outer = 500;  // safety cap; the rate loop runs to outer_tol
  int power_max_outer = 30;
  double admm_tol = 1e-3;
  int admm_max_iter = 100;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list item");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

/// Leading number and trailing unit word.
inline std::pair<double, std::string> number_unit(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number in '" + s + "'");
  }
  if (!std::isfinite(v)) throw ConfigError("non-finite number '" + s + "'");
  return {v, trim(s.substr(used))};
}

/// Powers: W, mW, dBW, dBm; bare "dB" is dBW; no unit is watts.
inline double parse_power(const std::string& s) {
  const auto [v, u] = number_unit(s);
  if (u.empty() || u == "W") return v;
  if (u == "mW") return v * 1e-3;
  if (u == "dBm") return dbm_to_watt(v);
  if (u == "dBW" || u == "dB") return dbw_to_watt(v);
  throw ConfigError("unknown power unit '" + u + "'");
}

/// Ratios: linear or dB.
inline double parse_ratio(const std::string& s) {
  const auto [v, u] = number_unit(s);
  if (u.empty()) return v;
  if (u == "dB") return db_to_linear(v);
  throw ConfigError("unknown ratio unit '" + u + "'");
}

inline double parse_plain(const std::string& s) {
  const auto [v, u] = number_unit(s);
  if (!u.empty() && u != "m") throw ConfigError("unexpected unit '" + u + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  const double v = parse_plain(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

inline std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError("expected a nonnegative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range: '" + s + "'");
  }
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "on" || s == "1") return true;
  if (s == "false" || s == "off" || s == "0") return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

inline double parse_axis_value(Axis a, const std::string& s) {
  switch (a) {
    case Axis::TransmitPower:
    case Axis::RisBudget: return parse_power(s);
    case Axis::Target: return parse_ratio(s);
    case Axis::Amplifiers:
    case Axis::Users: return parse_int(s);
    case Axis::UserDistance: return parse_plain(s);
  }
  return 0.0;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"algorithm",
       [](ExperimentConfig& c, const std::string& v) {
         Algorithm a;
         if (v == "sumrate") a = Algorithm::SumRate;
         else if (v == "powermin") a = Algorithm::PowerMin;
         else throw ConfigError("expected 'sumrate' or 'powermin', got '" + v + "'");
         if (c.preset != "convergence_trace" && a != c.algorithm)
           throw ConfigError("preset '" + c.preset + "' fixes the algorithm");
         c.algorithm = a;
       }},
      {"trials", [](ExperimentConfig& c, const std::string& v) { c.trials = parse_int(v); }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
      {"workers", [](ExperimentConfig& c, const std::string& v) { c.workers = parse_int(v); }},
      {"out", [](ExperimentConfig& c, const std::string& v) { c.out = v; }},
      {"timing", [](ExperimentConfig& c, const std::string& v) { c.timing = parse_bool(v); }},
      {"N", [](ExperimentConfig& c, const std::string& v) { c.N = parse_int(v); }},
      {"K", [](ExperimentConfig& c, const std::string& v) { c.K = parse_int(v); }},
      {"M", [](ExperimentConfig& c, const std::string& v) { c.M = parse_int(v); }},
      {"L", [](ExperimentConfig& c, const std::string& v) { c.L = parse_int(v); }},
      {"architectures", [](ExperimentConfig& c, const std::string& v) { c.architectures = split_list(v); }},
      {"P_BS", [](ExperimentConfig& c, const std::string& v) { c.P_BS = parse_power(v); }},
      {"P_RIS_tot", [](ExperimentConfig& c, const std::string& v) { c.P_RIS_tot = parse_power(v); }},
      {"W_BS", [](ExperimentConfig& c, const std::string& v) { c.W_BS = parse_power(v); }},
      {"W_PS", [](ExperimentConfig& c, const std::string& v) { c.W_PS = parse_power(v); }},
      {"W_PA", [](ExperimentConfig& c, const std::string& v) { c.W_PA = parse_power(v); }},
      {"nu1", [](ExperimentConfig& c, const std::string& v) { c.nu1 = parse_plain(v); }},
      {"nu2", [](ExperimentConfig& c, const std::string& v) { c.nu2 = parse_plain(v); }},
      {"sigma_sq", [](ExperimentConfig& c, const std::string& v) { c.sigma_sq = parse_power(v); }},
      {"sigma_z_sq", [](ExperimentConfig& c, const std::string& v) { c.sigma_z_sq = parse_power(v); }},
      {"Gamma", [](ExperimentConfig& c, const std::string& v) { c.Gamma = parse_ratio(v); }},
      {"user_x", [](ExperimentConfig& c, const std::string& v) { c.user_x = parse_plain(v); }},
      {"user_radius", [](ExperimentConfig& c, const std::string& v) { c.user_radius = parse_plain(v); }},
      {"ris_x", [](ExperimentConfig& c, const std::string& v) { c.ris_x = parse_plain(v); }},
      {"ris_y", [](ExperimentConfig& c, const std::string& v) { c.ris_y = parse_plain(v); }},
      {"C0", [](ExperimentConfig& c, const std::string& v) { c.path_loss.C0 = parse_ratio(v); }},
      {"d0", [](ExperimentConfig& c, const std::string& v) { c.path_loss.d0 = parse_plain(v); }},
      {"iota_d", [](ExperimentConfig& c, const std::string& v) { c.path_loss.iota_d = parse_plain(v); }},
      {"iota_G", [](ExperimentConfig& c, const std::string& v) { c.path_loss.iota_G = parse_plain(v); }},
      {"iota_r", [](ExperimentConfig& c, const std::string& v) { c.path_loss.iota_r = parse_plain(v); }},
      {"rho", [](ExperimentConfig& c, const std::string& v) { c.rho = parse_plain(v); }},
      {"outer_tol", [](ExperimentConfig& c, const std::string& v) { c.outer_tol = parse_plain(v); }},
      {"rate_max_outer", [](ExperimentConfig& c, const std::string& v) { c.rate_max_outer = parse_int(v); }},
      {"power_max_outer", [](ExperimentConfig& c, const std::string& v) { c.power_max_outer = parse_int(v); }},
      {"admm_tol", [](ExperimentConfig& c, const std::string& v) { c.admm_tol = parse_plain(v); }},
      {"admm_max_iter", [](ExperimentConfig& c, const std::string& v) { c.admm_max_iter = parse_int(v); }},
  };
  return m;
}

inline std::vector<std::string> default_sweep(const std::string& preset, Algorithm alg) {
  if (preset == "sumrate_vs_pbs") return {"10 dBm", "15 dBm", "20 dBm", "25 dBm", "30 dBm", "35 dBm", "40 dBm"};
  if (preset == "sumrate_vs_pris") return {"3 dBW", "3.5 dBW", "4 dBW", "4.15 dBW", "4.5 dBW", "5 dBW", "6 dBW"};
  if (preset == "sumrate_vs_L" || preset == "power_vs_L") return {"8", "16", "32", "64", "128", "256"};
  if (preset == "sumrate_vs_K" || preset == "power_vs_K") return {"2", "4", "6", "8"};
  if (preset == "sumrate_vs_x" || preset == "power_vs_x") return {"50", "100", "150", "200", "250"};
  if (preset == "power_vs_gamma") return {"0 dB", "4 dB", "8 dB", "12 dB", "16 dB"};
  return alg == Algorithm::PowerMin ? std::vector<std::string>{"8 dB"} : std::vector<std::string>{"40 dBm"};
}

/// Per-figure operating points that differ from the common defaults.
inline void apply_preset_defaults(ExperimentConfig& c) {
  if (c.preset == "sumrate_vs_pris") c.P_BS = dbm_to_watt(30.0);
  if (c.preset == "power_vs_K") c.Gamma = db_to_linear(10.0);
  if (c.preset == "power_vs_x") c.Gamma = db_to_linear(14.0);
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  auto need = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "': " + what);
  };
  need(trials >= 1, "trials", "must be at least 1");
  need(workers >= 1, "workers", "must be at least 1");
  need(!sweep.empty(), "sweep", "must not be empty");
  need(N >= 1 && K >= 1 && M >= 1 && L >= 1, "N/K/M/L", "dimensions must be positive");
  need(N >= K || axis == Axis::Users, "K", "must not exceed N");
  need(M % L == 0, "L", std::to_string(L) + " does not divide M = " + std::to_string(M));
  need(!architectures.empty(), "architectures", "must not be empty");
  for (const auto& a : architectures) need(a == "sub" || a == "fully", "architectures", "unknown entry '" + a + "'");
  for (double v : sweep) {
    switch (axis) {
      case Axis::Amplifiers:
        need(v >= 1 && M % static_cast<int>(v) == 0, "sweep",
             "L = " + std::to_string(static_cast<int>(v)) + " does not divide M = " + std::to_string(M));
        break;
      case Axis::Users: need(v >= 1 && v <= N, "sweep", "K must lie in [1, N]"); break;
      case Axis::UserDistance: need(v > user_radius, "sweep", "user distance must exceed user_radius"); break;
      default: need(v >= 0, "sweep", "values must be nonnegative"); break;
    }
  }
  need(P_BS >= 0 && P_RIS_tot >= 0 && W_BS >= 0 && W_PS >= 0 && W_PA >= 0, "power", "must be nonnegative");
  need(nu1 > 0 && nu1 <= 1, "nu1", "must lie in (0, 1]");
  need(nu2 > 0 && nu2 <= 1, "nu2", "must lie in (0, 1]");
  need(sigma_sq > 0, "sigma_sq", "must be positive");
  need(sigma_z_sq >= 0, "sigma_z_sq", "must be nonnegative");
  need(Gamma > 0, "Gamma", "must be positive");
  need(user_radius >= 0, "user_radius", "must be nonnegative");
  need(user_x > user_radius, "user_x", "must exceed user_radius");
  need(path_loss.C0 > 0 && path_loss.d0 > 0, "C0/d0", "must be positive");
  need(rho > 0, "rho", "must be positive");
  need(outer_tol > 0, "outer_tol", "must be positive");
  need(rate_max_outer >= 1, "rate_max_outer", "must be positive");
  need(power_max_outer >= 1, "power_max_outer", "must be positive");
  need(admm_tol > 0 && admm_max_iter >= 1, "admm_tol/admm_max_iter", "must be positive");
}

/// Parses `key = value` lines; `#` starts a comment. The preset supplies
/// its default sweep and operating point; explicit keys override both.
inline ExperimentConfig parse_config(std::istream& in) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    if (key != "preset" && key != "sweep" && detail::setters().count(key) == 0)
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (entries.count(key) != 0)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = Entry{value, line_no};
    order.push_back(key);
  }

  ExperimentConfig c;
  if (entries.count("preset") != 0) c.preset = entries["preset"].value;
  try {
    const PresetInfo& p = find_preset(c.preset);
    c.algorithm = p.algorithm;
    c.axis = p.axis;
  } catch (const ConfigError& e) {
    throw ConfigError("line " + std::to_string(entries["preset"].line) + ": " + e.what());
  }
  detail::apply_preset_defaults(c);
  for (const auto& key : order) {
    if (key == "preset" || key == "sweep") continue;
    const Entry& e = entries[key];
    try {
      detail::setters().at(key)(c, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(e.line) + ": key '" + key + "': " + err.what());
    }
  }
  // a power-min trace follows the SINR target instead of P_BS
  if (c.preset == "convergence_trace" && c.algorithm == Algorithm::PowerMin) c.axis = Axis::Target;
  std::vector<std::string> items = detail::default_sweep(c.preset, c.algorithm);
  int sweep_line = 0;
  if (entries.count("sweep") != 0) {
    sweep_line = entries["sweep"].line;
    try {
      items = detail::split_list(entries["sweep"].value);
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(sweep_line) + ": key 'sweep': " + err.what());
    }
  }
  c.sweep.clear();
  for (const auto& s : items) {
    try {
      c.sweep.push_back(detail::parse_axis_value(c.axis, s));
    } catch (const ConfigError& err) {
      throw ConfigError("line " + std::to_string(sweep_line) + ": key 'sweep': " + err.what());
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

/// Replaces the preset after loading (CLI override): the new preset's
/// sweep and axis apply, other keys are kept.
inline void override_preset(ExperimentConfig& c, const std::string& name) {
  const PresetInfo& p = find_preset(name);
  c.preset = name;
  c.algorithm = p.algorithm;
  c.axis = p.axis;
  c.sweep.clear();
  for (const auto& s : detail::default_sweep(name, c.algorithm)) c.sweep.push_back(detail::parse_axis_value(c.axis, s));
  c.validate();
}

}  // namespace subris::harness

#endif  // SUBRIS_HARNESS_CONFIG_HPP_
