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

#include "vmass/mass_estimator.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace vmass {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative tolerance for declaring a regressor column dependent.
constexpr double kRankTol = 1e-10;

double GammaSeries(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (s + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper tail Q(s, x) by the modified Lentz continued fraction.
double GammaContinuedFraction(double s, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

absl::Status DriveLog::Validate() const {
  if (t.size() == 0 || a_meas.size() != t.size() ||
      f_res.size() != t.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "drive log columns need equal non-zero lengths, got t=", t.size(),
        " a_meas=", a_meas.size(), " f_res=", f_res.size()));
  }
  if (t.size() < 2) return absl::OkStatus();
  const double step = t(1) - t(0);
  if (!(step > 0.0)) {
    return absl::InvalidArgumentError("timestamps must increase");
  }
  for (Eigen::Index k = 1; k < t.size(); ++k) {
    const double dk = t(k) - t(k - 1);
    if (!(dk > 0.0) || std::abs(dk - step) > 1e-9 * std::max(1.0, std::abs(t(k)))) {
      return absl::InvalidArgumentError(absl::StrCat(
          "timestamps must be uniformly spaced; step ", dk, " at sample ",
          k + 1, " differs from ", step));
    }
  }
  return absl::OkStatus();
}

absl::Status QualityTarget::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1), got ", alpha));
  }
  if (n_params < 1) {
    return absl::InvalidArgumentError("n_params must be >= 1");
  }
  if (r_designed < 0.0 || gamma_acc < 0.0 || chi2 < 0.0 || sigma_e2 < 0.0 ||
      m_nominal < 0.0) {
    return absl::InvalidArgumentError("quality target fields must be >= 0");
  }
  if (r_designed > 0.0 && gamma_acc > 0.0 && sigma_e2 > 0.0 &&
      m_nominal > 0.0 && chi2 > 0.0) {
    const double implied = RDesignedFromAccuracy(*this);
    if (std::abs(implied - r_designed) > 1e-9 * std::max(1.0, r_designed)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "r_designed=", r_designed, " is inconsistent with gamma_acc=",
          gamma_acc, " (implies ", implied, ")"));
    }
  }
  return absl::OkStatus();
}

QualityTarget WithChi2FromAlpha(QualityTarget target) {
  absl::StatusOr<double> chi2 = Chi2Percentile(target.alpha, target.n_params);
  if (chi2.ok()) target.chi2 = *chi2;
  return target;
}

absl::StatusOr<double> ExcitationEnergy(const Eigen::VectorXd& a, int t) {
  if (t < 1 || t > a.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "excitation index ", t, " outside [1, ", a.size(), "]"));
  }
  return a.head(t).squaredNorm();
}

Eigen::VectorXd ExcitationTrace(const Eigen::VectorXd& a) {
  Eigen::VectorXd r(a.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    acc += a(k) * a(k);
    r(k) = acc;
  }
  return r;
}

absl::StatusOr<MassEstimate> EstimateMass(const Eigen::VectorXd& a,
                                          const Eigen::VectorXd& f_res) {
  if (a.size() != f_res.size() || a.size() < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "acceleration and force must have equal non-zero length, got ",
        a.size(), " and ", f_res.size()));
  }
  MassEstimate est;
  est.r_trace = ExcitationTrace(a);
  const double r_total = est.r_trace(a.size() - 1);
  if (!(r_total > 0.0)) {
    return absl::FailedPreconditionError(
        "mass is unidentifiable: acceleration is identically zero");
  }
  est.m_hat = f_res.dot(a) / r_total;
  est.theta_hat = Eigen::VectorXd::Constant(1, est.m_hat);
  const Eigen::Index dof = a.size() - 1;
  est.sigma_e2_hat =
      dof > 0 ? (f_res - est.m_hat * a).squaredNorm() / dof : kNaN;
  est.theta_cov = Eigen::MatrixXd::Constant(1, 1, est.sigma_e2_hat / r_total);
  return est;
}

absl::StatusOr<MassEstimate> EstimateWithNuisance(
    const Eigen::MatrixXd& regressors, const Eigen::VectorXd& y) {
  const Eigen::Index n_obs = regressors.rows();
  const Eigen::Index n_par = regressors.cols();
  if (n_par < 1 || y.size() != n_obs) {
    return absl::InvalidArgumentError(absl::StrCat(
        "regressors are ", n_obs, "x", n_par, " but y has ", y.size(),
        " entries"));
  }
  if (n_obs <= n_par) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need more observations than parameters, got N=", n_obs,
        " n=", n_par));
  }

  // Column-by-column Gram-Schmidt residual identifies the first dependent
  // column.
  Eigen::MatrixXd basis(n_obs, 0);
  for (Eigen::Index j = 0; j < n_par; ++j) {
    Eigen::VectorXd col = regressors.col(j);
    const double norm = col.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index b = 0; b < basis.cols(); ++b) {
        col -= basis.col(b).dot(col) * basis.col(b);
      }
    }
    if (norm == 0.0 || col.norm() <= kRankTol * norm) {
      return absl::FailedPreconditionError(absl::StrCat(
          "parameters are unidentifiable: regressor column ", j,
          j == 0 ? " (acceleration)" : "",
          " is linearly dependent on the preceding columns"));
    }
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = col / col.norm();
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(regressors);
  MassEstimate est;
  est.theta_hat = qr.solve(y);
  est.m_hat = est.theta_hat(0);
  const Eigen::VectorXd residual = y - regressors * est.theta_hat;
  est.sigma_e2_hat = residual.squaredNorm() / (n_obs - n_par);
  const Eigen::MatrixXd gram = regressors.transpose() * regressors;
  Eigen::MatrixXd cov =
      est.sigma_e2_hat *
      gram.ldlt().solve(Eigen::MatrixXd::Identity(n_par, n_par));
  est.theta_cov = 0.5 * (cov + cov.transpose());
  est.r_trace = ExcitationTrace(regressors.col(0));
  for (Eigen::Index j = 1; j < n_par; ++j) {
    const double first = regressors(0, j);
    if (first != 0.0 && (regressors.col(j).array() == first).all()) {
      est.delta_hat = est.theta_hat(j) * first;
      break;
    }
  }
  return est;
}

absl::StatusOr<MassEstimate> EstimateWithOffset(const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& f_res) {
  Eigen::MatrixXd phi(a.size(), 2);
  phi.col(0) = a;
  phi.col(1).setOnes();
  return EstimateWithNuisance(phi, f_res);
}

double RDesignedFromAccuracy(const QualityTarget& target) {
  return 2.0 * target.sigma_e2 * target.gamma_acc * target.chi2 /
         (target.m_nominal * target.m_nominal);
}

double AccuracyFromRDesigned(const QualityTarget& target) {
  return target.r_designed * target.m_nominal * target.m_nominal /
         (2.0 * target.sigma_e2 * target.chi2);
}

double DesignedRelativeError(const QualityTarget& target) {
  return std::sqrt(target.sigma_e2 * target.chi2 /
                   (target.m_nominal * target.m_nominal * target.r_designed));
}

double RegularizedLowerGamma(double s, double x) {
  if (x <= 0.0) return 0.0;
  if (x < s + 1.0) return GammaSeries(s, x);
  return 1.0 - GammaContinuedFraction(s, x);
}

absl::StatusOr<double> Chi2Percentile(double alpha, int dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1), got ", alpha));
  }
  if (dof < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("degrees of freedom must be >= 1, got ", dof));
  }
  // Solve P(k/2, x/2) = alpha: bracket, then safeguarded Newton.
  const double s = 0.5 * dof;
  auto cdf = [s](double x) { return RegularizedLowerGamma(s, 0.5 * x); };
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (cdf(hi) < alpha) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = cdf(x) - alpha;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double log_pdf = (s - 1.0) * std::log(0.5 * x) - 0.5 * x -
                           std::lgamma(s) - std::log(2.0);
    const double pdf = std::exp(log_pdf);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace vmass
