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

// Closed-form acceleration profiles for the excitation requirement
// sum a(k)^2 >= R. Everything here works on ideal acceleration: actuator lag
// is ignored and emitted profiles carry u = a.

#ifndef VMASS_ANALYTIC_PROFILES_H_
#define VMASS_ANALYTIC_PROFILES_H_

#include <vector>

#include "absl/status/statusor.h"
#include "vmass/aoid_problem.h"
#include "vmass/dynamics.h"

namespace vmass {

// Saw-tooth between v_min and v_max: n_plus samples at a_max, n_minus samples
// at a_min, repeated m_periods times. Sample counts are rounded up and the
// last step of each phase is trimmed so the phase gains exactly v_max - v_min.
struct PeriodicProfileSpec {
  int n_plus = 0;
  int n_minus = 0;
  int m_periods = 0;
  int total_n = 0;
  double energy_per_period = 0.0;  // sum of a^2 over one period, as built
};

struct PeriodicProfile {
  PeriodicProfileSpec spec;
  Profile profile;  // starts at v_min
};

// Fails when a single a_max step overshoots the velocity range.
absl::StatusOr<PeriodicProfile> BuildPeriodicProfile(const Bounds& bounds,
                                                     double ts,
                                                     double r_designed);

// v_max = (a_max / |a_min|) v_min.
double CriticalVmax(double a_max, double a_min, double v_min);

// Limit profile (cycle height -> 0, then a final ramp to v_max) distance.
//   d = (R ts - a_max dv) v_min / (|a_min| a_max) + dv v_min / a_max
//       + dv^2 / (2 a_max),  dv = v_max - v_min
double DistanceOptimalLimit(const Bounds& bounds, double ts, double r_designed);

// Alternative closed form without the ramp's dv v_min / a_max
// term. Kept for comparison.
double DistanceOptimalLimitAlt(const Bounds& bounds, double ts,
                                     double r_designed);

struct DStarResult {
  double distance = 0.0;
  // v_max / v_min = a_max / |a_min| within 1e-9 relative.
  bool critical_ratio_holds = false;
  // distance < 0: parameters outside the regime where the limit profile can
  // meet R at all.
  bool negative = false;
};

// d* = ts R v_max / a_max^2 - (v_max - v_min)^2 / (2 a_max), which is
// DistanceOptimalLimit evaluated at the critical ratio.
DStarResult DStar(const Bounds& bounds, double ts, double r_designed);

// ts R v_max / a_max^2 - (v_max^2 - v_min^2) / (2 a_max), an alternative closed form.
double DStarAlt(const Bounds& bounds, double ts, double r_designed);

// Lower bound on the distance of the limit profile with v_max free:
//   ts R v_min / (|a_min| a_max) - (a_max - |a_min|)^2 v_min^2
//                                  / (2 |a_min|^2 a_max)
double DistanceLowerBound(double a_max, double a_min, double v_min, double ts,
                          double r_designed);

// One acceleration/deceleration cycle between v_min and v1, in continuous
// time.
struct CycleGeometry {
  double duration = 0.0;
  double excitation = 0.0;  // sum of a^2 over the samples of the cycle
  double distance = 0.0;
};
CycleGeometry LowCycle(double a_max, double a_min, double v_min, double v1,
                       double ts);

// Ramp from v_min to v_max at a_max.
CycleGeometry FinalRamp(double a_max, double v_min, double v_max, double ts);

struct DistanceOptimalProfile {
  Profile profile;  // starts at v_min
  int m_cycles = 0;
  int n_up = 0;
  int n_down = 0;
  int n_ramp = 0;
};

// m_cycles cycles between v_min and v1, then a ramp to v_max, with the
// fewest cycles that bring the excitation to r_designed. Phase sample counts
// are rounded up with a trimmed last step.
absl::StatusOr<DistanceOptimalProfile> BuildDistanceOptimalProfile(
    const Bounds& bounds, double ts, double r_designed, double v1);

// Distance of the periodic profile with real-valued period count:
//   R ts (v_max + v_min) / (2 a_max |a_min|)
double DTimeFormula(const Bounds& bounds, double ts, double r_designed);

struct GapAnalysis {
  double delta_v = 0.0;
  double d_time = 0.0;
  double d_distance = 0.0;
  double delta_d = 0.0;
};

struct GapReport {
  std::vector<GapAnalysis> rows;
  // Vertex of the concave quadratic delta_d(delta_v).
  double delta_v_star = 0.0;
  bool strictly_increasing = false;
};

// delta_d(dv) = dv (R ts / (2 a_max |a_min|) + v_min / |a_min| - v_min / a_max)
//               - dv^2 / (2 a_max)
// i.e. DTimeFormula - DistanceOptimalLimit with v_max = v_min + dv.
double GapFormula(double a_max, double a_min, double v_min, double ts,
                  double r_designed, double delta_v);
double GapVertex(double a_max, double a_min, double v_min, double ts,
                 double r_designed);

// Alternative gap polynomial and its vertex:
//   -dv^2/(2 a_max) + dv/|a_min| (v_min + R ts/(2 a_max))
//   - v_min R ts / (2 |a_min| a_max)
double GapFormulaAlt(double a_max, double a_min, double v_min, double ts,
                           double r_designed, double delta_v);
double GapVertexAlt(double a_max, double a_min, double v_min, double ts,
                          double r_designed);

// Evaluates the gap on `delta_v_grid` (bounds.v_max is ignored). Each row's
// d_time and d_distance come from DTimeFormula and DistanceOptimalLimit;
// delta_d from GapFormula.
absl::StatusOr<GapReport> AnalyzeGap(const Bounds& bounds, double ts,
                                     double r_designed,
                                     const std::vector<double>& delta_v_grid);

}  // namespace vmass

#endif  // VMASS_ANALYTIC_PROFILES_H_
