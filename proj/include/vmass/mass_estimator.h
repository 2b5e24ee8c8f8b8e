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

#ifndef VMASS_MASS_ESTIMATOR_H_
#define VMASS_MASS_ESTIMATOR_H_

#include <optional>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace vmass {

// Recorded drive: uniformly spaced timestamps, measured acceleration and the
// resultant-force estimate.
struct DriveLog {
  Eigen::VectorXd t;       // s
  Eigen::VectorXd a_meas;  // m/s^2
  Eigen::VectorXd f_res;   // N

  // Equal non-zero lengths; t strictly increasing with a constant step
  // (to 1e-9 max(1, |t|)).
  absl::Status Validate() const;
};

// Least-squares fit of F_res = m a (+ nuisance terms) + e.
struct MassEstimate {
  double m_hat = 0.0;
  // Offset force in N, populated when the regressors include a constant
  // column.
  std::optional<double> delta_hat;
  Eigen::VectorXd theta_hat;  // all estimated parameters, mass first
  Eigen::MatrixXd theta_cov;  // sigma_e2_hat (Phi^T Phi)^-1
  Eigen::VectorXd r_trace;    // R(t), t = 1..N
  // Residual variance with N - n degrees of freedom; NaN when N == n.
  double sigma_e2_hat = 0.0;
};

// Application-oriented accuracy requirement on the mass estimate.
// J''_app = 2 / m0^2 (first diagonal entry when nuisance parameters exist).
struct QualityTarget {
  double r_designed = 0.0;  // required sum of squared accelerations
  double gamma_acc = 0.0;   // design accuracy (0 when not set)
  double alpha = 0.99;      // confidence level
  double chi2 = 0.0;        // chi2_alpha(n_params)
  int n_params = 1;
  double m_nominal = 0.0;  // a-priori mass (kg)
  double sigma_e2 = 0.0;   // assumed force-noise variance (N^2)

  absl::Status Validate() const;
};

// Fills `chi2` from `alpha` and `n_params`.
QualityTarget WithChi2FromAlpha(QualityTarget target);

// Sum of squared accelerations over the first t samples (1-based t).
absl::StatusOr<double> ExcitationEnergy(const Eigen::VectorXd& a, int t);
Eigen::VectorXd ExcitationTrace(const Eigen::VectorXd& a);

// m_hat = sum f a / R(N). Fails when R(N) = 0.
absl::StatusOr<MassEstimate> EstimateMass(const Eigen::VectorXd& a,
                                          const Eigen::VectorXd& f_res);

// Ordinary least squares on an N x n regressor matrix whose first column is
// the acceleration. A rank deficiency is reported with the first column that
// lies in the span of the ones before it.
absl::StatusOr<MassEstimate> EstimateWithNuisance(
    const Eigen::MatrixXd& regressors, const Eigen::VectorXd& y);

// Regressors [a, 1]: mass plus a constant force offset.
absl::StatusOr<MassEstimate> EstimateWithOffset(const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& f_res);

// R_designed = 2 sigma_e2 gamma chi2 / m0^2.
double RDesignedFromAccuracy(const QualityTarget& target);
// gamma = R_designed m0^2 / (2 sigma_e2 chi2).
double AccuracyFromRDesigned(const QualityTarget& target);
// sqrt(sigma_e2 chi2 / (m0^2 R_designed)).
double DesignedRelativeError(const QualityTarget& target);

// Inverse CDF of the chi-square distribution with `dof` degrees of freedom.
absl::StatusOr<double> Chi2Percentile(double alpha, int dof);
// Regularized lower incomplete gamma P(s, x); exposed for tests.
double RegularizedLowerGamma(double s, double x);

}  // namespace vmass

#endif  // VMASS_MASS_ESTIMATOR_H_
