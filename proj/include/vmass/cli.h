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

// The `vmass` command line: design, estimate, filter, simulate, analyze and
// export-lifted.

#ifndef VMASS_CLI_H_
#define VMASS_CLI_H_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vmass/bnb_solver.h"
#include "vmass/dynamics.h"
#include "vmass/io.h"

namespace vmass {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInfeasible = 2,
  kExitParseError = 3,
  kExitBudgetExhausted = 4,
};

struct DesignOutcome {
  Objective objective = Objective::kMinTime;
  int n = 0;
  SolveReport report;
  // Simulated design; empty when no incumbent exists.
  std::optional<Profile> profile;
  bool certified_path = false;  // branch and bound rather than search
  // Set when the horizon came from a min-time design.
  std::optional<int> min_time_n;
  std::optional<double> min_time_distance;
};

// Runs the design for config.problem.objective. Horizons up to
// config.bnb.max_n use the certified solver, longer ones the parameterized
// search. min_time searches up to config.n_max (grid.n when 0).
// min_distance uses grid.n when given, otherwise the min-time horizon plus
// extra_time_s.
absl::StatusOr<DesignOutcome> Design(const RunConfig& config);

ExitCode ExitCodeFor(const SolveReport& report);

// Entry point of the command-line tool; returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace vmass

#endif  // VMASS_CLI_H_
