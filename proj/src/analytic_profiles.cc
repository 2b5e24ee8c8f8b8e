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

#include "vmass/analytic_profiles.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace vmass {
namespace {

// Generated profiles longer than this are refused.
constexpr long kMaxSamples = 20'000'000;

// Samples needed to change velocity by dv at |level| per step.
int PhaseSamples(double dv, double level, double ts) {
  const double steps = dv / (ts * std::abs(level));
  return std::max(1, static_cast<int>(std::ceil(steps - 1e-9)));
}

// Appends a phase of `count` samples at `level` whose last sample is trimmed
// so the phase changes velocity by exactly sign(level) * dv.
void AppendPhase(std::vector<double>& a, int count, double level, double dv,
                 double ts) {
  const double mag = std::abs(level);
  const double sign = level > 0.0 ? 1.0 : -1.0;
  for (int i = 0; i + 1 < count; ++i) a.push_back(level);
  const double last = std::clamp(dv / ts - (count - 1) * mag, 0.0, mag);
  a.push_back(sign * last);
}

double PhaseEnergy(int count, double level, double dv, double ts) {
  const double mag = std::abs(level);
  const double last = std::clamp(dv / ts - (count - 1) * mag, 0.0, mag);
  return (count - 1) * mag * mag + last * last;
}

absl::Status CheckMagnitudes(const Bounds& bounds, double ts,
                             double r_designed) {
  if (!(bounds.a_min < 0.0 && bounds.a_max > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need a_min < 0 < a_max, got a_min=", bounds.a_min,
        " a_max=", bounds.a_max));
  }
  if (!(ts > 0.0) || !std::isfinite(ts)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling period must be positive, got ", ts));
  }
  if (!(r_designed >= 0.0) || !std::isfinite(r_designed)) {
    return absl::InvalidArgumentError(
        absl::StrCat("r_designed must be non-negative, got ", r_designed));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<PeriodicProfile> BuildPeriodicProfile(const Bounds& bounds,
                                                     double ts,
                                                     double r_designed) {
  if (absl::Status s = CheckMagnitudes(bounds, ts, r_designed); !s.ok()) {
    return s;
  }
  const double dv = bounds.v_max - bounds.v_min;
  if (!(dv > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need v_max > v_min, got v_min=", bounds.v_min,
        " v_max=", bounds.v_max));
  }
  if (ts * bounds.a_max > dv * (1.0 + 1e-12)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "one step at a_max gains ", ts * bounds.a_max,
        " m/s, more than the velocity range ", dv));
  }
  PeriodicProfileSpec spec;
  spec.n_plus = PhaseSamples(dv, bounds.a_max, ts);
  spec.n_minus = PhaseSamples(dv, bounds.a_min, ts);
  spec.energy_per_period = PhaseEnergy(spec.n_plus, bounds.a_max, dv, ts) +
                           PhaseEnergy(spec.n_minus, bounds.a_min, dv, ts);
  spec.m_periods = std::max(
      1, static_cast<int>(std::ceil(r_designed / spec.energy_per_period)));
  const long total =
      static_cast<long>(spec.m_periods) * (spec.n_plus + spec.n_minus);
  if (total > kMaxSamples) {
    return absl::InvalidArgumentError(
        absl::StrCat("periodic profile needs ", total, " samples"));
  }
  spec.total_n = static_cast<int>(total);

  std::vector<double> a;
  a.reserve(spec.total_n);
  for (int m = 0; m < spec.m_periods; ++m) {
    AppendPhase(a, spec.n_plus, bounds.a_max, dv, ts);
    AppendPhase(a, spec.n_minus, bounds.a_min, dv, ts);
  }
  absl::StatusOr<SamplingGrid> grid = SamplingGrid::Create(ts, spec.total_n);
  if (!grid.ok()) return grid.status();
  absl::StatusOr<Profile> profile = ProfileFromAcceleration(
      Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()), *grid,
      bounds.v_min);
  if (!profile.ok()) return profile.status();
  return PeriodicProfile{spec, *std::move(profile)};
}

double CriticalVmax(double a_max, double a_min, double v_min) {
  return a_max / std::abs(a_min) * v_min;
}

double DistanceOptimalLimit(const Bounds& bounds, double ts,
                            double r_designed) {
  const double amax = bounds.a_max;
  const double amin = std::abs(bounds.a_min);
  const double dv = bounds.v_max - bounds.v_min;
  return (r_designed * ts - amax * dv) * bounds.v_min / (amin * amax) +
         dv * bounds.v_min / amax + dv * dv / (2.0 * amax);
}

double DistanceOptimalLimitAlt(const Bounds& bounds, double ts,
                                     double r_designed) {
  const double amax = bounds.a_max;
  const double amin = std::abs(bounds.a_min);
  const double dv = bounds.v_max - bounds.v_min;
  return (r_designed * ts + bounds.v_min * amax - amax * bounds.v_max) *
             bounds.v_min / (amin * amax) +
         dv * dv / (2.0 * amax);
}

DStarResult DStar(const Bounds& bounds, double ts, double r_designed) {
  const double amax = bounds.a_max;
  const double dv = bounds.v_max - bounds.v_min;
  DStarResult result;
  result.distance =
      ts * r_designed * bounds.v_max / (amax * amax) - dv * dv / (2.0 * amax);
  const double critical = CriticalVmax(amax, bounds.a_min, bounds.v_min);
  result.critical_ratio_holds =
      std::abs(bounds.v_max - critical) <=
      1e-9 * std::max(1.0, std::abs(critical));
  result.negative = result.distance < 0.0;
  return result;
}

double DStarAlt(const Bounds& bounds, double ts, double r_designed) {
  const double amax = bounds.a_max;
  return ts * r_designed * bounds.v_max / (amax * amax) -
         (bounds.v_max * bounds.v_max - bounds.v_min * bounds.v_min) /
             (2.0 * amax);
}

double DistanceLowerBound(double a_max, double a_min, double v_min, double ts,
                          double r_designed) {
  const double amin = std::abs(a_min);
  const double diff = a_max - amin;
  return ts * r_designed * v_min / (amin * a_max) -
         diff * diff * v_min * v_min / (2.0 * amin * amin * a_max);
}

CycleGeometry LowCycle(double a_max, double a_min, double v_min, double v1,
                       double ts) {
  const double amin = std::abs(a_min);
  const double dv1 = v1 - v_min;
  CycleGeometry c;
  c.duration = (amin + a_max) * dv1 / (amin * a_max);
  c.excitation = dv1 * (amin + a_max) / ts;
  c.distance = (amin + a_max) * dv1 * (v1 + v_min) / (2.0 * amin * a_max);
  return c;
}

CycleGeometry FinalRamp(double a_max, double v_min, double v_max, double ts) {
  const double dv = v_max - v_min;
  CycleGeometry c;
  c.duration = dv / a_max;
  c.excitation = dv * a_max / ts;
  c.distance = c.duration * v_min + c.duration * dv / 2.0;
  return c;
}

absl::StatusOr<DistanceOptimalProfile> BuildDistanceOptimalProfile(
    const Bounds& bounds, double ts, double r_designed, double v1) {
  if (absl::Status s = CheckMagnitudes(bounds, ts, r_designed); !s.ok()) {
    return s;
  }
  if (!(bounds.v_min < v1 && v1 <= bounds.v_max)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need v_min < v1 <= v_max, got v1=", v1, " in [", bounds.v_min, ", ",
        bounds.v_max, "]"));
  }
  const double dv = bounds.v_max - bounds.v_min;
  const double dv1 = v1 - bounds.v_min;
  DistanceOptimalProfile out;
  out.n_up = PhaseSamples(dv1, bounds.a_max, ts);
  out.n_down = PhaseSamples(dv1, bounds.a_min, ts);
  out.n_ramp = dv > 0.0 ? PhaseSamples(dv, bounds.a_max, ts) : 0;
  const double cycle_energy = PhaseEnergy(out.n_up, bounds.a_max, dv1, ts) +
                              PhaseEnergy(out.n_down, bounds.a_min, dv1, ts);
  const double ramp_energy =
      out.n_ramp > 0 ? PhaseEnergy(out.n_ramp, bounds.a_max, dv, ts) : 0.0;
  if (!(cycle_energy > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cycle height ", dv1, " m/s too small to excite on a ", ts,
        " s grid"));
  }
  const double cycles =
      std::max(0.0, std::ceil((r_designed - ramp_energy) / cycle_energy));
  const double total = cycles * (out.n_up + out.n_down) + out.n_ramp;
  if (total > kMaxSamples) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cycle height ", dv1, " m/s needs ", total,
        " samples to reach the excitation target"));
  }
  out.m_cycles = static_cast<int>(cycles);
  if (total < 1) {
    return absl::InvalidArgumentError("profile would be empty");
  }
  std::vector<double> a;
  a.reserve(static_cast<size_t>(total));
  for (int m = 0; m < out.m_cycles; ++m) {
    AppendPhase(a, out.n_up, bounds.a_max, dv1, ts);
    AppendPhase(a, out.n_down, bounds.a_min, dv1, ts);
  }
  if (out.n_ramp > 0) AppendPhase(a, out.n_ramp, bounds.a_max, dv, ts);
  absl::StatusOr<SamplingGrid> grid =
      SamplingGrid::Create(ts, static_cast<int>(a.size()));
  if (!grid.ok()) return grid.status();
  absl::StatusOr<Profile> profile = ProfileFromAcceleration(
      Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()), *grid,
      bounds.v_min);
  if (!profile.ok()) return profile.status();
  out.profile = *std::move(profile);
  return out;
}

double DTimeFormula(const Bounds& bounds, double ts, double r_designed) {
  return r_designed * ts * (bounds.v_max + bounds.v_min) /
         (2.0 * bounds.a_max * std::abs(bounds.a_min));
}

double GapFormula(double a_max, double a_min, double v_min, double ts,
                  double r_designed, double delta_v) {
  const double amin = std::abs(a_min);
  const double slope = r_designed * ts / (2.0 * a_max * amin) + v_min / amin -
                       v_min / a_max;
  return delta_v * slope - delta_v * delta_v / (2.0 * a_max);
}

double GapVertex(double a_max, double a_min, double v_min, double ts,
                 double r_designed) {
  const double amin = std::abs(a_min);
  return r_designed * ts / (2.0 * amin) + a_max * v_min / amin - v_min;
}

double GapFormulaAlt(double a_max, double a_min, double v_min, double ts,
                           double r_designed, double delta_v) {
  const double amin = std::abs(a_min);
  return -delta_v * delta_v / (2.0 * a_max) +
         delta_v / amin * (v_min + r_designed * ts / (2.0 * a_max)) -
         v_min * r_designed * ts / (2.0 * amin * a_max);
}

double GapVertexAlt(double a_max, double a_min, double v_min, double ts,
                          double r_designed) {
  const double amin = std::abs(a_min);
  return a_max / amin * v_min + r_designed * ts / (2.0 * amin);
}

absl::StatusOr<GapReport> AnalyzeGap(const Bounds& bounds, double ts,
                                     double r_designed,
                                     const std::vector<double>& delta_v_grid) {
  if (absl::Status s = CheckMagnitudes(bounds, ts, r_designed); !s.ok()) {
    return s;
  }
  GapReport report;
  report.delta_v_star =
      GapVertex(bounds.a_max, bounds.a_min, bounds.v_min, ts, r_designed);
  report.strictly_increasing = true;
  for (double dv : delta_v_grid) {
    Bounds b = bounds;
    b.v_max = bounds.v_min + dv;
    GapAnalysis row;
    row.delta_v = dv;
    row.d_time = DTimeFormula(b, ts, r_designed);
    row.d_distance = DistanceOptimalLimit(b, ts, r_designed);
    row.delta_d =
        GapFormula(b.a_max, b.a_min, b.v_min, ts, r_designed, dv);
    if (!report.rows.empty() &&
        !(dv > report.rows.back().delta_v &&
          row.delta_d > report.rows.back().delta_d)) {
      report.strictly_increasing = false;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace vmass
