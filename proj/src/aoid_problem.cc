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

#include "vmass/aoid_problem.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace vmass {
namespace {

void AddRow(LinearConstraints& lc, int row, const Eigen::RowVectorXd& coeffs,
            double rhs, RowKind kind, int sample) {
  lc.a.row(row) = coeffs;
  lc.b(row) = rhs;
  lc.kinds[row] = kind;
  lc.samples[row] = sample;
}

void Record(CategoryViolation& cat, double amount, int sample) {
  if (amount > 0.0 && cat.first_sample == 0) cat.first_sample = sample;
  cat.worst = std::max(cat.worst, amount);
}

}  // namespace

const char* ToString(Objective objective) {
  switch (objective) {
    case Objective::kMinTime:
      return "min_time";
    case Objective::kMinDistance:
      return "min_distance";
    case Objective::kMaxAccuracy:
      return "max_accuracy";
  }
  return "unknown";
}

absl::StatusOr<Objective> ParseObjective(const std::string& text) {
  if (text == "min_time") return Objective::kMinTime;
  if (text == "min_distance") return Objective::kMinDistance;
  if (text == "max_accuracy") return Objective::kMaxAccuracy;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown objective '", text,
      "' (expected min_time, min_distance or max_accuracy)"));
}

const char* ToString(RowKind kind) {
  switch (kind) {
    case RowKind::kAccelUpper:
      return "acceleration_upper";
    case RowKind::kAccelLower:
      return "acceleration_lower";
    case RowKind::kVelocityUpper:
      return "velocity_upper";
    case RowKind::kVelocityLower:
      return "velocity_lower";
    case RowKind::kInputUpper:
      return "input_upper";
    case RowKind::kInputLower:
      return "input_lower";
    case RowKind::kDistance:
      return "distance";
  }
  return "unknown";
}

absl::Status Bounds::Validate() const {
  if (!(a_min < 0.0 && a_max > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need a_min < 0 < a_max, got a_min=", a_min, " a_max=", a_max));
  }
  if (!(v_min <= v_max) || !std::isfinite(v_min) || !std::isfinite(v_max)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need v_min <= v_max, got v_min=", v_min, " v_max=", v_max));
  }
  if (!(UMin() < UMax())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need u_min < u_max, got u_min=", UMin(), " u_max=", UMax()));
  }
  if (d_max.has_value() && !(*d_max > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_max must be positive, got ", *d_max));
  }
  double prev = -1.0;
  for (const BoundSegment& seg : varying) {
    if (!(seg.d_from > prev) || seg.d_from < 0.0) {
      return absl::InvalidArgumentError(
          "varying bound segments must have increasing non-negative d_from");
    }
    prev = seg.d_from;
    const double lo = seg.a_min.value_or(a_min);
    const double hi = seg.a_max.value_or(a_max);
    if (!(lo < 0.0 && hi > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "segment at d=", seg.d_from, " needs a_min < 0 < a_max"));
    }
    if (!(seg.v_min.value_or(v_min) <= seg.v_max.value_or(v_max))) {
      return absl::InvalidArgumentError(absl::StrCat(
          "segment at d=", seg.d_from, " needs v_min <= v_max"));
    }
  }
  return absl::OkStatus();
}

absl::Status DesignProblem::Validate() const {
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  if (absl::Status s = actuator.Validate(); !s.ok()) return s;
  if (absl::Status s = bounds.Validate(); !s.ok()) return s;
  if (!(v0 >= bounds.v_min && v0 <= bounds.v_max)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "initial velocity ", v0, " outside [", bounds.v_min, ", ",
        bounds.v_max, "]"));
  }
  if (!(target.r_designed >= 0.0) || !std::isfinite(target.r_designed)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "r_designed must be finite and >= 0, got ", target.r_designed));
  }
  return absl::OkStatus();
}

SampleBounds ResolveSampleBounds(const Bounds& bounds, int n,
                                 const Eigen::VectorXd& distance) {
  SampleBounds sb{Eigen::VectorXd::Constant(n, bounds.a_min),
                  Eigen::VectorXd::Constant(n, bounds.a_max),
                  Eigen::VectorXd::Constant(n, bounds.v_min),
                  Eigen::VectorXd::Constant(n, bounds.v_max)};
  if (bounds.varying.empty() || distance.size() != n) return sb;
  for (int k = 0; k < n; ++k) {
    const BoundSegment* active = nullptr;
    for (const BoundSegment& seg : bounds.varying) {
      if (seg.d_from <= distance(k)) active = &seg;
    }
    if (active == nullptr) continue;
    sb.a_min(k) = active->a_min.value_or(bounds.a_min);
    sb.a_max(k) = active->a_max.value_or(bounds.a_max);
    sb.v_min(k) = active->v_min.value_or(bounds.v_min);
    sb.v_max(k) = active->v_max.value_or(bounds.v_max);
  }
  return sb;
}

absl::StatusOr<ConstraintSystem> AssembleConstraints(
    const DesignProblem& problem) {
  return AssembleConstraints(
      problem, ResolveSampleBounds(problem.bounds, problem.grid.n, {}));
}

absl::StatusOr<ConstraintSystem> AssembleConstraints(
    const DesignProblem& problem, const SampleBounds& sb) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  const int n = problem.grid.n;
  const double ts = problem.grid.ts;
  if (sb.a_min.size() != n || sb.v_max.size() != n) {
    return absl::InvalidArgumentError("sample bounds do not match grid size");
  }

  ConstraintSystem sys;
  sys.f = BuildActuatorToeplitz(problem.actuator, problem.grid);
  sys.quality = sys.f.transpose() * sys.f;
  sys.r_designed = problem.target.r_designed;
  const KinematicMatrices km = BuildKinematicMatrices(problem.grid);
  const Eigen::MatrixXd vel = ts * km.g * sys.f;
  sys.distance_cost = (ts * ts * km.h.row(n - 1) * sys.f).transpose();
  sys.distance_offset = problem.v0 * n * ts;

  const bool has_d = problem.bounds.d_max.has_value();
  const int rows = 6 * n + (has_d ? 1 : 0);
  LinearConstraints& lc = sys.linear;
  lc.a.resize(rows, n);
  lc.b.resize(rows);
  lc.kinds.resize(rows);
  lc.samples.resize(rows);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const double u_lo = problem.bounds.UMin();
  const double u_hi = problem.bounds.UMax();
  for (int k = 0; k < n; ++k) {
    AddRow(lc, k, sys.f.row(k), sb.a_max(k), RowKind::kAccelUpper, k + 1);
    AddRow(lc, n + k, -sys.f.row(k), -sb.a_min(k), RowKind::kAccelLower,
           k + 1);
    AddRow(lc, 2 * n + k, vel.row(k), sb.v_max(k) - problem.v0,
           RowKind::kVelocityUpper, k + 1);
    AddRow(lc, 3 * n + k, -vel.row(k), problem.v0 - sb.v_min(k),
           RowKind::kVelocityLower, k + 1);
    AddRow(lc, 4 * n + k, eye.row(k), u_hi, RowKind::kInputUpper, k + 1);
    AddRow(lc, 5 * n + k, -eye.row(k), -u_lo, RowKind::kInputLower, k + 1);
  }
  if (has_d) {
    AddRow(lc, 6 * n, sys.distance_cost.transpose(),
           *problem.bounds.d_max - sys.distance_offset, RowKind::kDistance, n);
  }
  return sys;
}

std::optional<RowViolation> FirstViolatedRow(const LinearConstraints& linear,
                                             const Eigen::VectorXd& u,
                                             double tol) {
  const Eigen::VectorXd slack = linear.a * u - linear.b;
  std::optional<RowViolation> first;
  for (int r = 0; r < slack.size(); ++r) {
    if (slack(r) <= tol) continue;
    if (!first.has_value() || linear.samples[r] < first->sample) {
      first = RowViolation{r, linear.kinds[r], linear.samples[r], slack(r)};
    }
  }
  return first;
}

absl::StatusOr<FeasibilityReport> CheckFeasibility(const Eigen::VectorXd& u,
                                                   const DesignProblem& problem,
                                                   double tol) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  absl::StatusOr<Profile> profile =
      SimulateProfile(u, problem.actuator, problem.grid, problem.v0);
  if (!profile.ok()) return profile.status();
  const int n = problem.grid.n;
  const SampleBounds sb = ResolveSampleBounds(problem.bounds, n, profile->d);
  const double u_lo = problem.bounds.UMin();
  const double u_hi = problem.bounds.UMax();

  FeasibilityReport rep;
  for (int k = 0; k < n; ++k) {
    const double a = profile->a(k), v = profile->v(k);
    Record(rep.acceleration, std::max(a - sb.a_max(k), sb.a_min(k) - a),
           k + 1);
    Record(rep.velocity, std::max(v - sb.v_max(k), sb.v_min(k) - v), k + 1);
    Record(rep.input, std::max(u(k) - u_hi, u_lo - u(k)), k + 1);
  }
  rep.final_distance = profile->d(n - 1);
  if (problem.bounds.d_max.has_value()) {
    Record(rep.distance, rep.final_distance - *problem.bounds.d_max, n);
  }
  rep.r_achieved = profile->a.squaredNorm();
  rep.excitation_shortfall =
      std::max(0.0, problem.target.r_designed - rep.r_achieved);
  rep.feasible = rep.acceleration.worst <= tol && rep.velocity.worst <= tol &&
                 rep.input.worst <= tol && rep.distance.worst <= tol &&
                 rep.excitation_shortfall <= tol;
  return rep;
}

absl::StatusOr<LiftedProblem> LiftProblem(const DesignProblem& problem) {
  if (!problem.bounds.IsConstant()) {
    return absl::UnimplementedError(
        "lifting supports constant bounds only; varying bounds given");
  }
  absl::StatusOr<ConstraintSystem> sys = AssembleConstraints(problem);
  if (!sys.ok()) return sys.status();
  const int n = problem.grid.n;
  const double ts = problem.grid.ts;
  const double v0 = problem.v0;
  const Bounds& b = problem.bounds;
  const Eigen::MatrixXd vel =
      ts * BuildKinematicMatrices(problem.grid).g * sys->f;

  LiftedProblem lp;
  lp.n = n;
  lp.cost_q = Eigen::MatrixXd::Zero(n, n);
  lp.cost_linear = Eigen::VectorXd::Zero(n);
  switch (problem.objective) {
    case Objective::kMinDistance:
      lp.cost_linear = sys->distance_cost;
      break;
    case Objective::kMaxAccuracy:
      lp.cost_q = -sys->quality;
      break;
    case Objective::kMinTime:
      break;
  }

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  // (a_k - a_min)(a_k - a_max) <= 0 with a_k = f_k^T u.
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd fk = sys->f.row(k).transpose();
    lp.rows.push_back({fk * fk.transpose(), -(b.a_min + b.a_max) * fk,
                       b.a_min * b.a_max, absl::StrCat("accel[", k + 1, "]")});
  }
  // (v_k - v_min)(v_k - v_max) <= 0 with v_k = v0 + g_k^T u.
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd gk = vel.row(k).transpose();
    lp.rows.push_back({gk * gk.transpose(),
                       (2.0 * v0 - b.v_min - b.v_max) * gk,
                       v0 * v0 - (b.v_min + b.v_max) * v0 + b.v_min * b.v_max,
                       absl::StrCat("velocity[", k + 1, "]")});
  }
  const Eigen::MatrixXd zero_q = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd e = zero;
    e(k) = 1.0;
    lp.rows.push_back({zero_q, e, -b.UMax(), absl::StrCat("u_max[", k + 1, "]")});
    lp.rows.push_back({zero_q, -e, b.UMin(), absl::StrCat("u_min[", k + 1, "]")});
  }
  if (b.d_max.has_value()) {
    lp.rows.push_back({zero_q, sys->distance_cost,
                       sys->distance_offset - *b.d_max, "distance"});
  }
  // Tr(U F^T F) >= R_designed.
  lp.rows.push_back(
      {-sys->quality, zero, problem.target.r_designed, "quality"});
  return lp;
}

Eigen::VectorXd EvaluateLiftedRows(const LiftedProblem& lifted,
                                   const Eigen::MatrixXd& u_mat,
                                   const Eigen::VectorXd& u) {
  Eigen::VectorXd out(lifted.rows.size());
  for (size_t i = 0; i < lifted.rows.size(); ++i) {
    const LiftedRow& row = lifted.rows[i];
    out(i) = (row.q.array() * u_mat.array()).sum() + row.linear.dot(u) +
             row.constant;
  }
  return out;
}

RankOneCheck VerifyRankOne(const Eigen::MatrixXd& u_mat,
                           const Eigen::VectorXd& u, double tol) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd m(n + 1, n + 1);
  m.topLeftCorner(n, n) = 0.5 * (u_mat + u_mat.transpose());
  m.topRightCorner(n, 1) = u;
  m.bottomLeftCorner(1, n) = u.transpose();
  m(n, n) = 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending

  RankOneCheck out;
  out.nuclear_norm = lambda.cwiseAbs().sum();
  out.lambda_max = lambda(n);
  double second = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    second = std::max(second, std::abs(lambda(i)));
  }
  out.lambda_second = second;
  const Eigen::VectorXd top = eig.eigenvectors().col(n);
  out.recovered_u = top(n) != 0.0 ? Eigen::VectorXd(top.head(n) / top(n))
                                  : Eigen::VectorXd::Zero(n);
  out.is_rank_one = out.lambda_max > 0.0 && second <= tol * out.lambda_max &&
                    (out.recovered_u - u).norm() <=
                        std::sqrt(tol) * std::max(1.0, u.norm());
  return out;
}

}  // namespace vmass
