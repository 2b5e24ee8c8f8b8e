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

// Synthetic drive logs and Monte Carlo evaluation of the estimation
// pipeline.

#ifndef VMASS_SIM_HARNESS_H_
#define VMASS_SIM_HARNESS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "vmass/dynamics.h"
#include "vmass/mass_estimator.h"
#include "vmass/wiener_filter.h"

namespace vmass {

struct SimConfig {
  double m_true = 15500.0;     // kg
  double delta_true = 0.0;     // N
  double sigma_e = 0.0;        // force noise std (N)
  double sigma_a_meas = 0.0;   // accelerometer noise std (m/s^2)
  int trials = 1;
  uint64_t seed = 0;

  // m_true > 0, noise stds >= 0 (zero gives noiseless logs), trials >= 1.
  absl::Status Validate() const;
};

// Seed of the random stream for one trial. Streams depend only on
// (seed, trial_index), so trials can run in any order.
uint64_t TrialStreamSeed(uint64_t seed, uint64_t trial_index);

// f_res = m_true a + delta_true + e, a_meas = a + e_a with independent
// Gaussian e, e_a; t(k) = k ts for k = 1..N.
absl::StatusOr<DriveLog> SynthesizeLog(const Profile& profile,
                                       const SimConfig& config,
                                       uint64_t trial_index);

struct PipelineOptions {
  bool use_wiener = false;
  bool use_offset = false;
  // First index with R(t) >= r_designed is reported when positive.
  double r_designed = 0.0;
  EbSearchSettings eb;
};

struct PipelineResult {
  MassEstimate estimate;
  Eigen::VectorXd regressor;      // acceleration used by the estimator
  std::optional<EbFit> wiener;    // set when the filter ran
  int first_index_reaching = 0;   // 1-based, 0 when never reached
};

// Optionally smooths a_meas with the Empirical-Bayes Wiener filter, then
// fits m (and the offset when requested) by least squares.
absl::StatusOr<PipelineResult> RunPipeline(const DriveLog& log,
                                           const PipelineOptions& options);

struct CoverageReport {
  std::vector<double> m_hat;
  std::vector<double> sigma_e2_hat;
  // Band from the design target: sqrt(sigma_e2 chi2 / (m0^2 R_designed)).
  double designed_relative_error = 0.0;
  int within = 0;
  double fraction = 0.0;
  double standard_error = 0.0;  // binomial, sqrt(f (1 - f) / trials)
  // Same count with the band recomputed per trial from sigma_e2_hat and the
  // trial's own R(N), and with the mean of sigma_e2_hat over the trials.
  double fraction_per_trial = 0.0;
  double fraction_pooled = 0.0;
  double pooled_sigma_e2 = 0.0;
  // Over trials whose excitation reached r_designed; NaN when none did.
  double mean_time_to_r = 0.0;
  double mean_distance_to_r = 0.0;
  int reached = 0;
};

struct CoverageOptions {
  bool use_wiener = false;
  EbSearchSettings eb;
};

// Runs config.trials synthetic experiments. The offset estimator is used
// when delta_true != 0, and the band's chi2 is then taken for two degrees
// of freedom (from target.alpha) unless target.chi2 is set.
absl::StatusOr<CoverageReport> MonteCarlo(const Profile& profile,
                                          const SimConfig& config,
                                          const QualityTarget& target,
                                          const CoverageOptions& options = {});

}  // namespace vmass

#endif  // VMASS_SIM_HARNESS_H_
