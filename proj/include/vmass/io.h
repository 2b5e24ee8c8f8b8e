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

// Configuration files, presets and the text formats read and written by the
// command-line tool.

#ifndef VMASS_IO_H_
#define VMASS_IO_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "vmass/aoid_problem.h"
#include "vmass/analytic_profiles.h"
#include "vmass/bnb_solver.h"
#include "vmass/dynamics.h"
#include "vmass/mass_estimator.h"
#include "vmass/profile_search.h"
#include "vmass/sim_harness.h"
#include "vmass/wiener_filter.h"

namespace vmass {

// Everything a command may need, in SI units.
struct RunConfig {
  DesignProblem problem;
  bool grid_n_set = false;
  bool v0_set = false;
  // Longest horizon searched by min_time (samples); 0 means grid.n.
  int n_max = 0;
  // Min-distance horizon as the min-time horizon plus this many seconds,
  // used when grid.n is not given.
  std::optional<double> extra_time_s;
  BnbSettings bnb;
  SearchSettings search;
  SimConfig sim;
  int gap_points = 21;
  std::string preset;
};

// Parses `key = value` lines; '#' starts a comment. Keys are dotted
// (grid.ts, bounds.v_max_kmh, target.r_designed, solver.tol, ...); a key
// ending in _kmh takes km/h and is divided by 3.6. A `preset` key must come
// first and loads the named preset before the remaining lines. Unknown
// keys, repeated keys and malformed values are errors naming the line.
absl::StatusOr<RunConfig> ParseConfig(absl::string_view text);
absl::StatusOr<RunConfig> LoadConfig(const std::string& path);

// "small-range" and "large-range": the vehicle study parameter sets with
// T_s = 0.01 s.
absl::StatusOr<RunConfig> Preset(absl::string_view name);
std::vector<std::string> PresetNames();

// Keys accepted by ParseConfig, sorted.
std::vector<std::string> ConfigKeys();

// Drive log: header `t,a_meas,f_res`, one sample per line, no blank lines.
absl::StatusOr<DriveLog> ParseDriveLog(absl::string_view text);
std::string FormatDriveLog(const DriveLog& log);

// Profile: header `k,t,u,a,v,d`, k from 1 and t = k ts.
absl::StatusOr<Profile> ParseProfile(absl::string_view text);
std::string FormatProfile(const Profile& profile);

// JSON documents. Non-finite numbers are written as null.
std::string SolveReportToJson(const SolveReport& report);
absl::StatusOr<SolveReport> SolveReportFromJson(absl::string_view text);
std::string MassEstimateToJson(const MassEstimate& estimate,
                               const std::optional<QualityTarget>& target);
std::string CoverageReportToJson(const CoverageReport& report);

// Lifted system as sparse triplets:
//   # comment lines
//   n <n>
//   variables <count>
//   rows <count>
//   label <row> <text>         (one per constraint row)
//   <row> <column> <value>     (non-zero coefficients)
// Row 0 is the objective, rows 1.. are constraints <= 0. Columns index the
// upper triangle of U row by row (U(i, j), i <= j), then u(1..n), then the
// constant 1. Off-diagonal U coefficients are doubled so that each row
// reads sum value * variable.
std::string FormatLiftedTriplets(const LiftedProblem& lifted);

// Reads a whole file.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace vmass

#endif  // VMASS_IO_H_
