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

#include "vmass/wiener_filter.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace vmass {
namespace {

constexpr double kJitterScale = 1e-10;

double Logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double Logit(double x) { return std::log(x / (1.0 - x)); }

// Minimal Nelder-Mead on R^2 with the standard reflection / expansion /
// contraction / shrink coefficients.
template <typename Fn>
std::array<double, 2> NelderMead2(Fn&& f, std::array<double, 2> start,
                                  std::array<double, 2> step, int max_evals,
                                  double tol, int* evals) {
  using Point = std::array<double, 2>;
  std::array<Point, 3> simplex = {start, start, start};
  simplex[1][0] += step[0];
  simplex[2][1] += step[1];
  std::array<double, 3> value;
  for (int i = 0; i < 3; ++i) value[i] = f(simplex[i]);
  *evals += 3;

  auto lerp = [](const Point& a, const Point& b, double t) {
    return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };

  while (*evals < max_evals) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return value[x] < value[y]; });
    const int best = order[0], mid = order[1], worst = order[2];
    if (std::abs(value[worst] - value[best]) <=
        tol * (1.0 + std::abs(value[best]))) {
      const double spread =
          std::max(std::abs(simplex[worst][0] - simplex[best][0]),
                   std::abs(simplex[worst][1] - simplex[best][1]));
      if (spread < 1e-6) break;
    }
    const Point centroid = lerp(simplex[best], simplex[mid], 0.5);
    const Point reflected = lerp(simplex[worst], centroid, 2.0);
    const double fr = f(reflected);
    ++*evals;
    if (fr < value[best]) {
      const Point expanded = lerp(simplex[worst], centroid, 3.0);
      const double fe = f(expanded);
      ++*evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[mid]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const Point contracted = outside ? lerp(simplex[worst], centroid, 1.5)
                                     : lerp(simplex[worst], centroid, 0.5);
    const double fc = f(contracted);
    ++*evals;
    if (fc < std::min(fr, value[worst])) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      simplex[i] = lerp(simplex[best], simplex[i], 0.5);
      value[i] = f(simplex[i]);
      ++*evals;
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (value[i] < value[best]) best = i;
  }
  return simplex[best];
}

}  // namespace

absl::StatusOr<WienerCoefficients> ComputeWienerCoefficients(double xi,
                                                             double sigma_v2,
                                                             double sigma_a2) {
  if (!(xi > 0.0 && xi < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("prior pole must lie in (0, 1), got ", xi));
  }
  if (!(sigma_v2 > 0.0) || !(sigma_a2 >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "variances must be positive, got sigma_v2=", sigma_v2,
        " sigma_a2=", sigma_a2));
  }
  if (sigma_a2 == 0.0) return WienerCoefficients{0.0, 1.0};
  const double denom = sigma_v2 + sigma_a2 * (1.0 + xi * xi);
  const double s = denom / (2.0 * xi * sigma_a2);
  // s - sqrt(s^2 - 1) loses precision for large s; 1 / (s + sqrt(s^2 - 1)) is
  // the same root.
  const double beta = 1.0 / (s + std::sqrt(s * s - 1.0));
  const double c = std::sqrt((1.0 + beta * beta) * sigma_v2 / denom);
  return WienerCoefficients{beta, c};
}

double WienerFrequencyResponse(double xi, double sigma_v2, double sigma_a2,
                               double omega) {
  const double prior =
      sigma_v2 / (1.0 + xi * xi - 2.0 * xi * std::cos(omega));
  return prior / (prior + sigma_a2);
}

double RealizedSquaredMagnitude(double beta, double c, double omega) {
  return c * c / (1.0 + beta * beta - 2.0 * beta * std::cos(omega));
}

LikelihoodTerms LikelihoodTermsDense(const Eigen::VectorXd& a, double xi,
                                     double gamma_ratio) {
  const Eigen::Index n = a.size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd impulse(n);
  double tap = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    impulse(k) = tap;
    tap *= xi;
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    t.col(col).tail(n - col) = impulse.head(n - col);
  }
  Eigen::MatrixXd gram = gamma_ratio * (t * t.transpose());
  gram.diagonal().array() += 1.0;
  gram.diagonal().array() += kJitterScale * gram.trace() / n;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  LikelihoodTerms terms;
  if (llt.info() != Eigen::Success) {
    terms.quadratic = std::numeric_limits<double>::quiet_NaN();
    terms.log_det = std::numeric_limits<double>::quiet_NaN();
    return terms;
  }
  const Eigen::VectorXd whitened = llt.matrixL().solve(a);
  terms.quadratic = whitened.squaredNorm();
  terms.log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return terms;
}

LikelihoodTerms LikelihoodTermsRecursive(const Eigen::VectorXd& a, double xi,
                                         double gamma_ratio) {
  // Kalman filter for x(k) = xi x(k-1) + w(k), y(k) = x(k) + e(k) with
  // var(w) = gamma, var(e) = 1 and x(0) = 0. The innovations factor the
  // joint density exactly.
  LikelihoodTerms terms;
  double mean = 0.0;
  double var = gamma_ratio;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double s = var + 1.0;
    const double innovation = a(k) - mean;
    terms.quadratic += innovation * innovation / s;
    terms.log_det += std::log(s);
    const double gain = var / s;
    mean = xi * (mean + gain * innovation);
    var = xi * xi * (var / s) + gamma_ratio;
  }
  return terms;
}

double CondensedFromTerms(const LikelihoodTerms& terms, Eigen::Index n) {
  const double nd = static_cast<double>(n);
  return nd - nd * std::log(nd) + nd * std::log(terms.quadratic) +
         terms.log_det;
}

absl::StatusOr<double> CondensedNegLogLik(const Eigen::VectorXd& a, double xi,
                                          double gamma_ratio) {
  if (a.size() < 2) {
    return absl::InvalidArgumentError("likelihood needs at least 2 samples");
  }
  if (!(xi > 0.0 && xi < 1.0) || !(gamma_ratio > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid hyperparameters xi=", xi, " gamma=", gamma_ratio));
  }
  const LikelihoodTerms terms =
      a.size() <= kDenseLikelihoodMaxSamples
          ? LikelihoodTermsDense(a, xi, gamma_ratio)
          : LikelihoodTermsRecursive(a, xi, gamma_ratio);
  return CondensedFromTerms(terms, a.size());
}

const char* ToString(EbFitStatus status) {
  switch (status) {
    case EbFitStatus::kOk:
      return "ok";
    case EbFitStatus::kGammaAtLowerBound:
      return "gamma_at_lower_bound";
    case EbFitStatus::kGammaAtUpperBound:
      return "gamma_at_upper_bound";
  }
  return "unknown";
}

absl::StatusOr<EbFit> FitEmpiricalBayes(const Eigen::VectorXd& a,
                                        const EbSearchSettings& settings) {
  if (a.size() < 10) {
    return absl::InvalidArgumentError(absl::StrCat(
        "empirical Bayes fit needs at least 10 samples, got ", a.size()));
  }
  if (!a.allFinite()) {
    return absl::InvalidArgumentError("signal contains non-finite values");
  }
  if (a.squaredNorm() == 0.0) {
    return absl::InvalidArgumentError("signal has zero energy");
  }
  if (!(settings.gamma_min > 0.0 && settings.gamma_max > settings.gamma_min)) {
    return absl::InvalidArgumentError("invalid gamma search range");
  }

  const double log_gmin = std::log(settings.gamma_min);
  const double log_gmax = std::log(settings.gamma_max);
  int evals = 0;
  auto objective = [&](double xi, double log_gamma) {
    ++evals;
    const double g = std::exp(std::clamp(log_gamma, log_gmin, log_gmax));
    const double x = std::clamp(xi, settings.xi_min, settings.xi_max);
    const LikelihoodTerms terms =
        a.size() <= kDenseLikelihoodMaxSamples
            ? LikelihoodTermsDense(a, x, g)
            : LikelihoodTermsRecursive(a, x, g);
    const double value = CondensedFromTerms(terms, a.size());
    return std::isfinite(value) ? value
                                : std::numeric_limits<double>::infinity();
  };

  const double decades = std::log10(settings.gamma_max / settings.gamma_min);
  const int gamma_points = std::max(
      2, static_cast<int>(std::ceil(decades * settings.gamma_points_per_decade)) +
             1);
  double best_value = std::numeric_limits<double>::infinity();
  double best_xi = 0.5;
  double best_log_gamma = 0.0;
  for (double xi : settings.xi_grid) {
    for (int i = 0; i < gamma_points; ++i) {
      const double lg =
          log_gmin + (log_gmax - log_gmin) * i / (gamma_points - 1);
      const double value = objective(xi, lg);
      if (value < best_value) {
        best_value = value;
        best_xi = xi;
        best_log_gamma = lg;
      }
    }
  }

  auto refine_fn = [&](const std::array<double, 2>& z) {
    return objective(Logistic(z[0]), z[1]);
  };
  int nm_evals = 0;
  const std::array<double, 2> z = NelderMead2(
      refine_fn, {Logit(best_xi), best_log_gamma}, {0.5, 1.0},
      settings.refine_max_evals, settings.refine_tol, &nm_evals);
  double xi_hat = std::clamp(Logistic(z[0]), settings.xi_min, settings.xi_max);
  double log_gamma_hat = std::clamp(z[1], log_gmin, log_gmax);
  double value = objective(xi_hat, log_gamma_hat);
  if (best_value < value) {
    xi_hat = best_xi;
    log_gamma_hat = best_log_gamma;
    value = best_value;
  }

  if (settings.white_noise_threshold > 0.0) {
    double low_value = std::numeric_limits<double>::infinity();
    double low_xi = best_xi;
    for (double xi : settings.xi_grid) {
      const double v = objective(xi, log_gmin);
      if (v < low_value) {
        low_value = v;
        low_xi = xi;
      }
    }
    if (low_value - value <= settings.white_noise_threshold) {
      xi_hat = low_xi;
      log_gamma_hat = log_gmin;
      value = low_value;
    }
  }

  const double gamma_hat = std::exp(log_gamma_hat);
  const LikelihoodTerms terms =
      a.size() <= kDenseLikelihoodMaxSamples
          ? LikelihoodTermsDense(a, xi_hat, gamma_hat)
          : LikelihoodTermsRecursive(a, xi_hat, gamma_hat);

  EbFit fit;
  fit.neg_log_lik = value;
  fit.evaluations = evals;
  fit.model.xi = xi_hat;
  fit.model.gamma_ratio = gamma_hat;
  fit.model.sigma_a2 = terms.quadratic / static_cast<double>(a.size());
  fit.model.sigma_v2 = gamma_hat * fit.model.sigma_a2;
  constexpr double kBoundaryLogTol = 1e-3;
  if (log_gamma_hat <= log_gmin + kBoundaryLogTol) {
    fit.status = EbFitStatus::kGammaAtLowerBound;
  } else if (log_gamma_hat >= log_gmax - kBoundaryLogTol) {
    fit.status = EbFitStatus::kGammaAtUpperBound;
  }
  absl::StatusOr<WienerCoefficients> coeffs = ComputeWienerCoefficients(
      fit.model.xi, fit.model.sigma_v2, fit.model.sigma_a2);
  if (!coeffs.ok()) return coeffs.status();
  fit.model.beta = coeffs->beta;
  fit.model.c = coeffs->c;
  return fit;
}

Eigen::VectorXd FiltFiltZeroPhase(const Eigen::VectorXd& signal, double beta,
                                  double c) {
  const Eigen::Index n = signal.size();
  if (n == 0) return signal;
  const Eigen::Index wanted =
      static_cast<Eigen::Index>(std::ceil(6.0 / (1.0 - beta)));
  const Eigen::Index pad = std::min(wanted, n - 1);

  Eigen::VectorXd ext(n + 2 * pad);
  ext.segment(pad, n) = signal;
  for (Eigen::Index j = 1; j <= pad; ++j) {
    ext(pad - j) = 2.0 * signal(0) - signal(j);
    ext(pad + n - 1 + j) = 2.0 * signal(n - 1) - signal(n - 1 - j);
  }

  // Each pass starts from the steady-state response to its first sample.
  const double dc_gain = c / (1.0 - beta);
  const Eigen::Index last = ext.size() - 1;
  double state = dc_gain * ext(0);
  ext(0) = state;
  for (Eigen::Index i = 1; i <= last; ++i) {
    state = beta * state + c * ext(i);
    ext(i) = state;
  }
  state = dc_gain * ext(last);
  ext(last) = state;
  for (Eigen::Index i = last - 1; i >= 0; --i) {
    state = beta * state + c * ext(i);
    ext(i) = state;
  }
  return ext.segment(pad, n);
}

absl::StatusOr<SmoothedSignal> WienerSmooth(const Eigen::VectorXd& a,
                                            const EbSearchSettings& settings) {
  absl::StatusOr<EbFit> fit = FitEmpiricalBayes(a, settings);
  if (!fit.ok()) return fit.status();
  SmoothedSignal out;
  out.filtered = FiltFiltZeroPhase(a, fit->model.beta, fit->model.c);
  out.fit = *std::move(fit);
  return out;
}

}  // namespace vmass
