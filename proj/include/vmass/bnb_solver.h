// Copyright 2026 The vmass Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     https://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VMASS_BNB_SOLVER_H_
#define VMASS_BNB_SOLVER_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "vmass/aoid_problem.h"

namespace vmass {

enum class SolveStatus {
  kOptimal,
  kGapReached,
  kInfeasible,
  kBudgetExhausted,
};

const char* ToString(SolveStatus status);

struct SolveReport {
  Eigen::VectorXd u_star;
  double objective_value = 0.0;
  // Certified bounds on the optimal value. For a maximization the incumbent
  // is the lower bound, for a minimization it is the upper bound.
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;  // (upper - lower) / max(1, |upper|); NaN if uncertified
  long nodes_explored = 0;
  SolveStatus status = SolveStatus::kInfeasible;
  bool certified = true;
  // Incumbent passed the simulation-based feasibility check.
  bool verified = false;
  // Certified upper bound on the achievable excitation, reported with an
  // infeasibility verdict.
  std::optional<double> excitation_bound;
  std::string message;
};

struct BnbSettings {
  double tol = 1e-4;
  long node_budget = 200000;
  int max_n = 64;
  bool root_bound_tightening = true;
  // Early exits used by feasibility questions: stop once the incumbent
  // reaches `stop_above` or the certified upper bound drops below
  // `stop_below` (maximization only).
  std::optional<double> stop_above;
  std::optional<double> stop_below;
  // Tolerance of the final simulation-based check.
  double verify_tol = 1e-7;
};

// Maximizes u^T F^T F u over the linear constraints of `problem`.
absl::StatusOr<SolveReport> MaxExcitation(const DesignProblem& problem,
                                          const BnbSettings& settings = {});

// Minimizes cost^T u + offset subject to the linear constraints and
// u^T F^T F u >= r_designed.
absl::StatusOr<SolveReport> SolveLinearCost(const DesignProblem& problem,
                                            const Eigen::VectorXd& cost,
                                            double offset,
                                            const BnbSettings& settings = {});

// Dispatches on problem.objective: min_distance minimizes d(N),
// max_accuracy maximizes the excitation, min_time returns the maximum
// excitation design on this horizon. Distance-dependent bounds are resolved
// by fixed-point iteration.
absl::StatusOr<SolveReport> SolveFixedHorizon(const DesignProblem& problem,
                                              const BnbSettings& settings = {});

struct MinTimeResult {
  int n_star = 0;
  SolveReport report;
  int horizons_checked = 0;
};

// Smallest n in [n_lo, n_hi] whose maximum excitation reaches r_designed,
// located by bisection. problem.grid.n is ignored.
absl::StatusOr<MinTimeResult> SolveMinTime(const DesignProblem& problem,
                                           int n_lo, int n_hi,
                                           const BnbSettings& settings = {});

}  // namespace vmass

#endif  // VMASS_BNB_SOLVER_H_
