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

#ifndef VMASS_DYNAMICS_H_
#define VMASS_DYNAMICS_H_

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace vmass {

// Uniform sampling of an experiment: `n` samples spaced `ts` seconds apart.
// Sample indices are 1-based in all formulas; storage is 0-based.
struct SamplingGrid {
  double ts = 0.0;
  int n = 0;

  static absl::StatusOr<SamplingGrid> Create(double ts, int n);
  absl::Status Validate() const;
  double Duration() const { return ts * n; }
};

// First-order actuator response F(q) = (1 - p) / (1 - p q^-1) with unity
// static gain. A pole of zero is the identity actuator (a = u).
struct ActuatorModel {
  double pole = 0.0;

  static absl::StatusOr<ActuatorModel> Create(double pole);
  static ActuatorModel Identity() { return ActuatorModel{0.0}; }
  absl::Status Validate() const;
};

// A realized drive: input request, acceleration, velocity and cumulative
// distance on a sampling grid, starting from velocity `v0`.
struct Profile {
  SamplingGrid grid;
  Eigen::VectorXd u;
  Eigen::VectorXd a;
  Eigen::VectorXd v;
  Eigen::VectorXd d;
  double v0 = 0.0;
};

// Lower-triangular Toeplitz matrix of the actuator impulse response, so that
// a = F u. First column is (1-p) [1, p, p^2, ...].
Eigen::MatrixXd BuildActuatorToeplitz(const ActuatorModel& actuator,
                                      const SamplingGrid& grid);

// a(k) = p a(k-1) + (1-p) u(k) with a(0) = 0.
absl::StatusOr<Eigen::VectorXd> SimulateResponse(const Eigen::VectorXd& u,
                                                 const ActuatorModel& actuator,
                                                 const SamplingGrid& grid);

struct Kinematics {
  Eigen::VectorXd v;
  Eigen::VectorXd d;
};

// Velocity and distance for acceleration held constant over each sample
// interval [(k-1) ts, k ts):
//   v(k) = v0 + ts * sum_{l<=k} a(l)
//   d(k) = v0 k ts + ts^2 * sum_{l<=k} (k - l + 1/2) a(l)
absl::StatusOr<Kinematics> IntegrateKinematics(const Eigen::VectorXd& a,
                                               const SamplingGrid& grid,
                                               double v0);

// G: lower-triangular ones. H(k, l) = k - l + 1/2 for l <= k.
// With v0 = 0: v = ts G a and d = ts^2 H a.
struct KinematicMatrices {
  Eigen::MatrixXd g;
  Eigen::MatrixXd h;
};
KinematicMatrices BuildKinematicMatrices(const SamplingGrid& grid);

// Last row of H, i.e. the weights of d(N) on the acceleration samples.
Eigen::VectorXd TerminalDistanceWeights(const SamplingGrid& grid);

// Runs the actuator and kinematics for an input sequence.
absl::StatusOr<Profile> SimulateProfile(const Eigen::VectorXd& u,
                                        const ActuatorModel& actuator,
                                        const SamplingGrid& grid, double v0);

// Builds a profile directly from an acceleration sequence (u = a), i.e. as
// driven through the identity actuator.
absl::StatusOr<Profile> ProfileFromAcceleration(const Eigen::VectorXd& a,
                                                const SamplingGrid& grid,
                                                double v0);

// Recovers u from a = F u by forward substitution.
Eigen::VectorXd InvertActuator(const Eigen::VectorXd& a,
                               const ActuatorModel& actuator);

}  // namespace vmass

#endif  // VMASS_DYNAMICS_H_
