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

#ifndef VMASS_AOID_PROBLEM_H_
#define VMASS_AOID_PROBLEM_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vmass/dynamics.h"
#include "vmass/mass_estimator.h"

namespace vmass {

enum class Objective {
  kMinTime,
  kMinDistance,
  kMaxAccuracy,
};

const char* ToString(Objective objective);
absl::StatusOr<Objective> ParseObjective(const std::string& text);

// Bound overrides that apply once the travelled distance reaches d_from.
struct BoundSegment {
  double d_from = 0.0;
  std::optional<double> a_min;
  std::optional<double> a_max;
  std::optional<double> v_min;
  std::optional<double> v_max;
};

struct Bounds {
  double a_min = 0.0;
  double a_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  // Input limits default to the acceleration limits (unity static gain).
  std::optional<double> u_min;
  std::optional<double> u_max;
  std::optional<double> d_max;
  // Sorted by d_from.
  std::vector<BoundSegment> varying;

  double UMin() const { return u_min.value_or(a_min); }
  double UMax() const { return u_max.value_or(a_max); }
  bool IsConstant() const { return varying.empty(); }
  absl::Status Validate() const;
};

struct DesignProblem {
  Objective objective = Objective::kMinTime;
  SamplingGrid grid;
  ActuatorModel actuator;
  Bounds bounds;
  QualityTarget target;
  double v0 = 0.0;

  absl::Status Validate() const;
};

// Per-sample limits after resolving distance-dependent overrides.
struct SampleBounds {
  Eigen::VectorXd a_min;
  Eigen::VectorXd a_max;
  Eigen::VectorXd v_min;
  Eigen::VectorXd v_max;
};

// Limits for sample k are looked up at distance d(k). An empty `distance`
// resolves every sample to the base bounds.
SampleBounds ResolveSampleBounds(const Bounds& bounds, int n,
                                 const Eigen::VectorXd& distance);

enum class RowKind {
  kAccelUpper,
  kAccelLower,
  kVelocityUpper,
  kVelocityLower,
  kInputUpper,
  kInputLower,
  kDistance,
};

const char* ToString(RowKind kind);

// A u <= b. Rows are grouped by kind in the order of RowKind, each group in
// increasing sample order.
struct LinearConstraints {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<RowKind> kinds;
  std::vector<int> samples;  // 1-based sample index of each row
};

struct ConstraintSystem {
  LinearConstraints linear;
  Eigen::MatrixXd f;        // actuator Toeplitz
  Eigen::MatrixXd quality;  // F^T F; u^T quality u >= r_designed
  double r_designed = 0.0;
  Eigen::VectorXd distance_cost;  // d(N) = distance_cost^T u + distance_offset
  double distance_offset = 0.0;
};

absl::StatusOr<ConstraintSystem> AssembleConstraints(
    const DesignProblem& problem);
absl::StatusOr<ConstraintSystem> AssembleConstraints(
    const DesignProblem& problem, const SampleBounds& sample_bounds);

struct RowViolation {
  int row = -1;
  RowKind kind = RowKind::kAccelUpper;
  int sample = 0;
  double amount = 0.0;
};

// The violated linear row with the smallest sample index (ties broken by row
// order), or nullopt when every row holds within `tol`.
std::optional<RowViolation> FirstViolatedRow(const LinearConstraints& linear,
                                             const Eigen::VectorXd& u,
                                             double tol);

struct CategoryViolation {
  double worst = 0.0;  // largest violation, 0 when satisfied
  int first_sample = 0;  // 1-based, 0 when satisfied
};

struct FeasibilityReport {
  bool feasible = false;
  CategoryViolation acceleration;
  CategoryViolation velocity;
  CategoryViolation input;
  CategoryViolation distance;
  double excitation_shortfall = 0.0;
  double r_achieved = 0.0;
  double final_distance = 0.0;
};

// Simulates u through the dynamics and checks every constraint per sample.
absl::StatusOr<FeasibilityReport> CheckFeasibility(const Eigen::VectorXd& u,
                                                   const DesignProblem& problem,
                                                   double tol);

// <q, U> + linear^T u + constant <= 0.
struct LiftedRow {
  Eigen::MatrixXd q;
  Eigen::VectorXd linear;
  double constant = 0.0;
  std::string label;
};

// Linear system in the lifted variables (U, u) with the side conditions
// [[U, u], [u^T, 1]] >= 0 and rank one.
struct LiftedProblem {
  int n = 0;
  Eigen::MatrixXd cost_q;  // objective <cost_q, U> + cost_linear^T u
  Eigen::VectorXd cost_linear;
  std::vector<LiftedRow> rows;

  // Free entries of the symmetric U, of u, and the constant 1.
  int NumVariables() const { return n * (n + 1) / 2 + n + 1; }
};

absl::StatusOr<LiftedProblem> LiftProblem(const DesignProblem& problem);

// Row values at (U, u); feasible rows are <= 0.
Eigen::VectorXd EvaluateLiftedRows(const LiftedProblem& lifted,
                                   const Eigen::MatrixXd& u_mat,
                                   const Eigen::VectorXd& u);

struct RankOneCheck {
  bool is_rank_one = false;
  Eigen::VectorXd recovered_u;
  double nuclear_norm = 0.0;
  double lambda_max = 0.0;
  double lambda_second = 0.0;
};

RankOneCheck VerifyRankOne(const Eigen::MatrixXd& u_mat,
                           const Eigen::VectorXd& u, double tol);

}  // namespace vmass

#endif  // VMASS_AOID_PROBLEM_H_
