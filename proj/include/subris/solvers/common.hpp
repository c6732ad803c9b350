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

#ifndef SUBRIS_SOLVERS_COMMON_HPP_
#define SUBRIS_SOLVERS_COMMON_HPP_

#include <string>

#include "subris/types.hpp"

namespace subris {

struct SolverOptions {
  double kkt_tol = 1e-7;
  int max_iter = 200;
  double bisection_tol = 1e-14;  // relative width of the final multiplier bracket
  double barrier_mu = 12.0;      // barrier parameter growth per centering step
};

enum class SolveStatus { Optimal, Infeasible, MaxIter };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

struct SolveReport {
  SolveStatus status = SolveStatus::Optimal;
  double kkt_residual = 0.0;
  int iterations = 0;
  double objective = 0.0;

  bool ok() const { return status == SolveStatus::Optimal; }
};

namespace detail {

inline double safe_scale(double s) { return s > 1e-300 ? s : 1.0; }

}  // namespace detail
}  // namespace subris

#endif  // SUBRIS_SOLVERS_COMMON_HPP_
