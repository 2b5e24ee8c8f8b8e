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

#ifndef VMASS_WIENER_FILTER_H_
#define VMASS_WIENER_FILTER_H_

#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"

namespace vmass {

// Zero-phase Wiener smoother for a signal modeled as an AR(1) process
// a_o = v / (1 - xi q^-1) observed in white noise of variance sigma_a2.
// The realized first-order filter c / (1 - beta q^-1) is run forward and
// backward so that its squared magnitude equals the Wiener filter.
struct WienerModel {
  double xi = 0.0;           // prior pole
  double gamma_ratio = 0.0;  // sigma_v2 / sigma_a2
  double sigma_a2 = 0.0;     // measurement-noise variance
  double sigma_v2 = 0.0;     // prior innovation variance
  double beta = 0.0;         // realized filter pole
  double c = 0.0;            // realized filter gain
};

struct WienerCoefficients {
  double beta = 0.0;
  double c = 0.0;
};

// Stable root of beta^2 - 2 S beta + 1 = 0 with
// S = (sigma_v2 + sigma_a2 (1 + xi^2)) / (2 xi sigma_a2), and the matching
// gain c = sqrt((1 + beta^2) sigma_v2 / (sigma_v2 + sigma_a2 (1 + xi^2))).
// sigma_a2 == 0 yields the identity filter.
absl::StatusOr<WienerCoefficients> ComputeWienerCoefficients(double xi,
                                                             double sigma_v2,
                                                             double sigma_a2);

// W(e^{iw}) of the smoother, and |F_W(e^{iw})|^2 of the realized filter pair.
double WienerFrequencyResponse(double xi, double sigma_v2, double sigma_a2,
                               double omega);
double RealizedSquaredMagnitude(double beta, double c, double omega);

// Signals up to this length use the explicit N x N covariance; longer ones use
// the O(N) Kalman innovations form of the same likelihood.
inline constexpr int kDenseLikelihoodMaxSamples = 256;

// Condensed negative log-likelihood
//   N - N log N + N log a^T (T T^T g + I)^{-1} a + log det(T T^T g + I)
// with T the lower Toeplitz impulse-response matrix of 1 / (1 - xi q^-1).
absl::StatusOr<double> CondensedNegLogLik(const Eigen::VectorXd& a, double xi,
                                          double gamma_ratio);

// Both evaluation routes, exposed for cross-checking.
struct LikelihoodTerms {
  double quadratic = 0.0;  // a^T Sigma^{-1} a, Sigma in units of sigma_a2
  double log_det = 0.0;
};
LikelihoodTerms LikelihoodTermsDense(const Eigen::VectorXd& a, double xi,
                                     double gamma_ratio);
LikelihoodTerms LikelihoodTermsRecursive(const Eigen::VectorXd& a, double xi,
                                         double gamma_ratio);
double CondensedFromTerms(const LikelihoodTerms& terms, Eigen::Index n);

struct EbSearchSettings {
  double gamma_min = 1e-3;
  double gamma_max = 1e5;
  int gamma_points_per_decade = 4;
  std::vector<double> xi_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35,
                                 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70,
                                 0.75, 0.80, 0.85, 0.90, 0.95};
  double xi_min = 1e-4;
  double xi_max = 1.0 - 1e-6;
  int refine_max_evals = 400;
  double refine_tol = 1e-10;
  // The signal-free model (gamma at gamma_min) is kept whenever its condensed
  // likelihood is within this many units of the optimum. 5.99 is the 95%
  // likelihood-ratio threshold for two hyperparameters; 0 disables.
  double white_noise_threshold = 5.991;
};

enum class EbFitStatus {
  kOk,
  kGammaAtLowerBound,
  kGammaAtUpperBound,
};

const char* ToString(EbFitStatus status);

struct EbFit {
  WienerModel model;
  double neg_log_lik = 0.0;
  EbFitStatus status = EbFitStatus::kOk;
  int evaluations = 0;
};

// Maximum-likelihood (Empirical Bayes) estimate of (xi, gamma_ratio): a coarse
// grid over xi x log(gamma) followed by Nelder-Mead refinement in
// (logit xi, log gamma). A gamma estimate on the search boundary is reported
// through `status` rather than as an error.
absl::StatusOr<EbFit> FitEmpiricalBayes(const Eigen::VectorXd& a,
                                        const EbSearchSettings& settings = {});

// Forward then backward pass of c / (1 - beta q^-1). The ends are extended by
// odd reflection over ceil(6 / (1 - beta)) samples (capped at the signal
// length minus one) and each pass starts from its steady state.
Eigen::VectorXd FiltFiltZeroPhase(const Eigen::VectorXd& signal, double beta,
                                  double c);

// Fits the model on `a` and applies the realized smoother to it.
struct SmoothedSignal {
  EbFit fit;
  Eigen::VectorXd filtered;
};
absl::StatusOr<SmoothedSignal> WienerSmooth(
    const Eigen::VectorXd& a, const EbSearchSettings& settings = {});

}  // namespace vmass

#endif  // VMASS_WIENER_FILTER_H_
