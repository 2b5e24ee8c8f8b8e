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

#ifndef VMASS_LP_SOLVER_H_
#define VMASS_LP_SOLVER_H_

#include <Eigen/Dense>

namespace vmass {

// minimize cost^T x  s.t.  a x <= b,  lower <= x <= upper (finite).
struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kIterationLimit,
  kInvalid,
};

const char* ToString(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kInvalid;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

struct LpSettings {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 50000;
};

// Dense two-phase primal simplex. Deterministic: Dantzig pricing with the
// lowest index breaking ties, switching to Bland's rule after a run of
// degenerate pivots.
LpResult SolveLp(const LinearProgram& lp, const LpSettings& settings = {});

}  // namespace vmass

#endif  // VMASS_LP_SOLVER_H_
