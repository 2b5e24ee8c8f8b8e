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

#include "vmass/dynamics.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace vmass {

absl::StatusOr<SamplingGrid> SamplingGrid::Create(double ts, int n) {
  SamplingGrid grid{ts, n};
  if (absl::Status s = grid.Validate(); !s.ok()) return s;
  return grid;
}

absl::Status SamplingGrid::Validate() const {
  if (!(ts > 0.0) || !std::isfinite(ts)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling period must be positive, got ", ts));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of samples must be >= 1, got ", n));
  }
  return absl::OkStatus();
}

absl::StatusOr<ActuatorModel> ActuatorModel::Create(double pole) {
  ActuatorModel model{pole};
  if (absl::Status s = model.Validate(); !s.ok()) return s;
  return model;
}

absl::Status ActuatorModel::Validate() const {
  if (!(pole >= 0.0 && pole < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("actuator pole must lie in [0, 1), got ", pole));
  }
  return absl::OkStatus();
}

Eigen::MatrixXd BuildActuatorToeplitz(const ActuatorModel& actuator,
                                      const SamplingGrid& grid) {
  const int n = grid.n;
  Eigen::VectorXd impulse(n);
  double tap = 1.0 - actuator.pole;
  for (int k = 0; k < n; ++k) {
    impulse(k) = tap;
    tap *= actuator.pole;
  }
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    f.col(col).tail(n - col) = impulse.head(n - col);
  }
  return f;
}

absl::StatusOr<Eigen::VectorXd> SimulateResponse(const Eigen::VectorXd& u,
                                                 const ActuatorModel& actuator,
                                                 const SamplingGrid& grid) {
  if (u.size() != grid.n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input length ", u.size(), " does not match grid size ", grid.n));
  }
  const double p = actuator.pole;
  Eigen::VectorXd a(u.size());
  double state = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    state = p * state + (1.0 - p) * u(k);
    a(k) = state;
  }
  return a;
}

absl::StatusOr<Kinematics> IntegrateKinematics(const Eigen::VectorXd& a,
                                               const SamplingGrid& grid,
                                               double v0) {
  if (a.size() != grid.n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "acceleration length ", a.size(), " does not match grid size ",
        grid.n));
  }
  if (!std::isfinite(v0)) {
    return absl::InvalidArgumentError("initial velocity must be finite");
  }
  const double ts = grid.ts;
  Kinematics out{Eigen::VectorXd(a.size()), Eigen::VectorXd(a.size())};
  double v = v0;
  double d = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    d += v * ts + 0.5 * a(k) * ts * ts;
    v += ts * a(k);
    out.v(k) = v;
    out.d(k) = d;
  }
  return out;
}

KinematicMatrices BuildKinematicMatrices(const SamplingGrid& grid) {
  const int n = grid.n;
  KinematicMatrices m{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      m.g(k, l) = 1.0;
      m.h(k, l) = (k - l) + 0.5;
    }
  }
  return m;
}

Eigen::VectorXd TerminalDistanceWeights(const SamplingGrid& grid) {
  Eigen::VectorXd w(grid.n);
  for (int l = 0; l < grid.n; ++l) w(l) = (grid.n - 1 - l) + 0.5;
  return w;
}

absl::StatusOr<Profile> SimulateProfile(const Eigen::VectorXd& u,
                                        const ActuatorModel& actuator,
                                        const SamplingGrid& grid, double v0) {
  absl::StatusOr<Eigen::VectorXd> a = SimulateResponse(u, actuator, grid);
  if (!a.ok()) return a.status();
  absl::StatusOr<Kinematics> kin = IntegrateKinematics(*a, grid, v0);
  if (!kin.ok()) return kin.status();
  return Profile{grid, u, *std::move(a), std::move(kin->v), std::move(kin->d),
                 v0};
}

absl::StatusOr<Profile> ProfileFromAcceleration(const Eigen::VectorXd& a,
                                                const SamplingGrid& grid,
                                                double v0) {
  return SimulateProfile(a, ActuatorModel::Identity(), grid, v0);
}

Eigen::VectorXd InvertActuator(const Eigen::VectorXd& a,
                               const ActuatorModel& actuator) {
  const double p = actuator.pole;
  Eigen::VectorXd u(a.size());
  double prev = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    u(k) = (a(k) - p * prev) / (1.0 - p);
    prev = a(k);
  }
  return u;
}

}  // namespace vmass
