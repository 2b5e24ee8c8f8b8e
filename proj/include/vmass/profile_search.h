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

// Design over piecewise-constant input profiles for horizons too long for
// the certified solver. Results carry no optimality certificate.

#ifndef VMASS_PROFILE_SEARCH_H_
#define VMASS_PROFILE_SEARCH_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vmass/aoid_problem.h"
#include "vmass/bnb_solver.h"

namespace vmass {

// Input held at levels[i] on samples [switch_times[i-1], switch_times[i]),
// with switch_times 1-based and the first segment starting at sample 1.
struct ProfileParam {
  std::vector<int> switch_times;
  std::vector<double> levels;  // switch_times.size() + 1 entries

  absl::Status Validate(int n) const;
};

absl::StatusOr<Eigen::VectorXd> ExpandProfileParam(const ProfileParam& param,
                                                   int n);

// `switches` evenly spaced switches alternating between u_hi and u_lo,
// starting at u_hi.
ProfileParam BangBangTemplate(int n, int switches, double u_hi, double u_lo);

// `cycles` repetitions of `up` samples at u_hi and `down` samples at u_lo,
// then `gap_level` until sample n - ramp and u_hi from there (no ramp when
// ramp <= 0). The cycles are cut off where the ramp starts.
ProfileParam CycleTemplate(int n, int cycles, int up, int down, int ramp,
                           double u_hi, double u_lo, double gap_level = 0.0);

// Bang-bang switching that accounts for the actuator lag: it leaves the
// current level at the last sample from which the velocity, continuing to
// respond after the switch, still stays within [v_low, v_high]. From sample
// `ramp_from` (1-based, 0 to disable) the band becomes [v_min, v_max].
// Velocity excursions after sample n are ignored.
ProfileParam LagAwareBangBang(const DesignProblem& problem, int n, double v_low,
                              double v_high, int ramp_from = 0);

struct DpSettings {
  // Stages; the input is held on blocks of ceil(n / stages) samples.
  int stages = 300;
  int accel_points = 61;
  int velocity_points = 161;
  int bisection_steps = 30;
};

// Dynamic program over a grid of (acceleration, velocity) states with the
// input held at u_min, 0 or u_max per block. For min_distance the stage cost
// is distance minus a multiplier times excitation, and the multiplier is
// bisected until r_designed is reached; otherwise excitation is maximized.
// The forward pass simulates each block exactly and looks one block ahead
// on the interpolated cost-to-go. Constant bounds only. For min_distance the
// policies on both sides of the final multiplier are returned, the one
// reaching r_designed first; the other may fall short of it.
absl::StatusOr<std::vector<ProfileParam>> DynamicProgrammingSeed(
    const DesignProblem& problem, const DpSettings& settings = {});

struct SearchSettings {
  // Extra starts made by jittering the best seed.
  int multistart = 4;
  uint64_t seed = 1;
  int max_sweeps = 400;
  // Also move levels within [u_min, u_max].
  bool optimize_levels = false;
  double level_step = 0.05;
  double feasibility_tol = 1e-9;
  // Refinement of the incumbent by successive linear programs over an input
  // held constant on `slp_blocks` equal blocks. Each program replaces the
  // excitation by its tangent, which under-estimates it, so every iterate
  // stays feasible. Applied to the winner of the coordinate descent.
  bool slp_refine = true;
  int slp_blocks = 160;
  int slp_iterations = 30;
};

// Score of an input sequence: summed constraint violation and the objective
// of problem.objective (excitation for min_time and max_accuracy, final
// distance for min_distance). For min_distance the excitation shortfall
// counts as violation, relative to r_designed.
struct ProfileScore {
  double violation = 0.0;
  double excitation = 0.0;
  double distance = 0.0;
};
ProfileScore ScoreInput(const Eigen::VectorXd& u, const DesignProblem& problem);

// Coordinate descent on switch times (and optionally levels) from each seed
// and from jittered copies of the best one. Scores compare violation first,
// then the objective. The returned incumbent passes CheckFeasibility;
// status is kGapReached, certified is false and gap is NaN. min_time is
// treated as excitation maximization on problem.grid.n that must reach
// r_designed.
absl::StatusOr<SolveReport> SolveProfileParameterized(
    const DesignProblem& problem, const std::vector<ProfileParam>& seeds,
    const SearchSettings& settings = {});

// Parameterized search returning the winning parameters as well.
struct ParameterizedResult {
  SolveReport report;
  ProfileParam param;
};
absl::StatusOr<ParameterizedResult> SearchProfile(
    const DesignProblem& problem, const std::vector<ProfileParam>& seeds,
    const SearchSettings& settings = {});

// Successive-linear-programming refinement of an input that satisfies the
// velocity and distance constraints; an excitation shortfall is allowed.
// Returns the better of `start` and the refined profile, as block levels.
absl::StatusOr<ParameterizedResult> RefineBySlp(const DesignProblem& problem,
                                                const Eigen::VectorXd& start,
                                                const SearchSettings& settings);

struct ParameterizedMinTime {
  int n_star = 0;
  ParameterizedResult result;
};

// Shortest horizon up to n_max on which the search reaches r_designed,
// located by bisection between the excitation lower bound and a lag-aware
// bang-bang profile. Bisection probes skip the SLP refinement; the final
// horizon gets it when enabled. problem.grid.n is ignored.
absl::StatusOr<ParameterizedMinTime> SolveMinTimeParameterized(
    const DesignProblem& problem, int n_max,
    const SearchSettings& settings = {});

// Minimum final distance on problem.grid.n, seeded with low cycles of
// several heights followed by a ramp towards v_max.
absl::StatusOr<ParameterizedResult> SolveMinDistanceParameterized(
    const DesignProblem& problem, const SearchSettings& settings = {});

}  // namespace vmass

#endif  // VMASS_PROFILE_SEARCH_H_
