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
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace vmass {
namespace {

constexpr double kPi = std::numbers::pi;

// a(k) = x(k) + e(k), x(k) = xi x(k-1) + w(k), x(0) = 0.
Eigen::VectorXd SyntheticSignal(double xi, double sigma_v, double sigma_a,
                                int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd a(n);
  double x = 0.0;
  for (int k = 0; k < n; ++k) {
    x = xi * x + sigma_v * normal(rng);
    a(k) = x + sigma_a * normal(rng);
  }
  return a;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

TEST(WienerCoefficientsTest, HandAlgebra) {
  const auto coeffs = ComputeWienerCoefficients(0.5, 1.0, 1.0);
  ASSERT_TRUE(coeffs.ok());
  const double s = 2.25;
  const double beta = s - std::sqrt(s * s - 1.0);
  EXPECT_NEAR(coeffs->beta, beta, 1e-14);
  EXPECT_NEAR(coeffs->beta, 0.234436, 1e-6);
  EXPECT_NEAR(coeffs->c, std::sqrt((1 + beta * beta) / 2.25), 1e-14);
  EXPECT_NEAR(coeffs->c, 0.684739, 5e-6);
}

TEST(WienerCoefficientsTest, NoiselessLimitIsIdentity) {
  const auto exact = ComputeWienerCoefficients(0.9, 1.0, 0.0);
  ASSERT_TRUE(exact.ok());
  EXPECT_EQ(exact->beta, 0.0);
  EXPECT_EQ(exact->c, 1.0);
  const auto tiny = ComputeWienerCoefficients(0.9, 1.0, 1e-12);
  ASSERT_TRUE(tiny.ok());
  EXPECT_NEAR(tiny->beta, 0.0, 1e-11);
  EXPECT_NEAR(tiny->c, 1.0, 1e-11);
}

TEST(WienerCoefficientsTest, RejectsInvalid) {
  EXPECT_FALSE(ComputeWienerCoefficients(0.0, 1.0, 1.0).ok());
  EXPECT_FALSE(ComputeWienerCoefficients(1.0, 1.0, 1.0).ok());
  EXPECT_FALSE(ComputeWienerCoefficients(0.5, 0.0, 1.0).ok());
  EXPECT_FALSE(ComputeWienerCoefficients(0.5, 1.0, -1.0).ok());
}

TEST(WienerCoefficientsTest, FrequencyResponseMatchesWiener) {
  for (double xi : {0.1, 0.5, 0.9, 0.99}) {
    for (double ratio : {0.01, 1.0, 100.0}) {
      const double sa2 = 0.04;
      const double sv2 = ratio * sa2;
      const auto coeffs = ComputeWienerCoefficients(xi, sv2, sa2);
      ASSERT_TRUE(coeffs.ok());
      for (int i = 0; i < 512; ++i) {
        const double omega = kPi * i / 511.0;
        const double w = WienerFrequencyResponse(xi, sv2, sa2, omega);
        EXPECT_NEAR(RealizedSquaredMagnitude(coeffs->beta, coeffs->c, omega),
                    w, 1e-10);
      }
    }
  }
}

TEST(WienerCoefficientsTest, RootPairAndMonotonicity) {
  double prev = 0.0;
  for (double sa2 = 0.01; sa2 < 10.0; sa2 *= 1.5) {
    const double xi = 0.7, sv2 = 0.3;
    const auto coeffs = ComputeWienerCoefficients(xi, sv2, sa2);
    ASSERT_TRUE(coeffs.ok());
    EXPECT_GT(coeffs->beta, 0.0);
    EXPECT_LT(coeffs->beta, 1.0);
    // Both roots of beta^2 - 2 S beta + 1 = 0 multiply to one.
    const double s = (sv2 + sa2 * (1 + xi * xi)) / (2 * xi * sa2);
    const double other = s + std::sqrt(s * s - 1.0);
    EXPECT_NEAR(coeffs->beta * other, 1.0, 1e-12);
    EXPECT_GT(coeffs->beta, prev);
    prev = coeffs->beta;
  }
}

TEST(CondensedNegLogLikTest, TwoSampleHandAlgebra) {
  Eigen::VectorXd a(2);
  a << 1.0, 0.0;
  // Sigma = gamma T T^T + I = [[2, 0.5], [0.5, 2.25]].
  const double det = 2.0 * 2.25 - 0.25;
  const double quad = 2.25 / det;
  const double expected =
      2.0 - 2.0 * std::log(2.0) + 2.0 * std::log(quad) + std::log(det);
  const auto value = CondensedNegLogLik(a, 0.5, 1.0);
  ASSERT_TRUE(value.ok());
  EXPECT_NEAR(*value, expected, 1e-8);
}

TEST(CondensedNegLogLikTest, VanishingPriorLimit) {
  const Eigen::VectorXd a = SyntheticSignal(0.8, 1.0, 1.0, 50, 1);
  const double n = 50.0;
  const double limit = n - n * std::log(n) + n * std::log(a.squaredNorm());
  const auto value = CondensedNegLogLik(a, 0.8, 1e-9);
  ASSERT_TRUE(value.ok());
  EXPECT_NEAR(*value, limit, 1e-6);
}

TEST(CondensedNegLogLikTest, RecursiveMatchesCholesky) {
  for (int n : {2, 17, 200}) {
    const Eigen::VectorXd a = SyntheticSignal(0.9, 0.3, 0.5, n, n);
    for (double xi : {0.05, 0.5, 0.95}) {
      for (double g : {1e-3, 1.0, 1e3}) {
        const double dense = CondensedFromTerms(LikelihoodTermsDense(a, xi, g), n);
        const double rec =
            CondensedFromTerms(LikelihoodTermsRecursive(a, xi, g), n);
        EXPECT_NEAR(dense, rec, 1e-8 * std::max(1.0, std::abs(dense)))
            << "n=" << n << " xi=" << xi << " g=" << g;
      }
    }
  }
}

TEST(CondensedNegLogLikTest, RejectsInvalid) {
  EXPECT_FALSE(CondensedNegLogLik(Eigen::VectorXd::Ones(1), 0.5, 1.0).ok());
  EXPECT_FALSE(CondensedNegLogLik(Eigen::VectorXd::Ones(3), 1.0, 1.0).ok());
  EXPECT_FALSE(CondensedNegLogLik(Eigen::VectorXd::Ones(3), 0.5, 0.0).ok());
}

TEST(FitEmpiricalBayesTest, WhiteNoisePinsGammaLow) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 0.3);
  Eigen::VectorXd a(5000);
  for (auto& x : a) x = normal(rng);
  const auto fit = FitEmpiricalBayes(a);
  ASSERT_TRUE(fit.ok());
  EXPECT_EQ(fit->status, EbFitStatus::kGammaAtLowerBound);
  const double var = a.squaredNorm() / a.size();
  EXPECT_NEAR(fit->model.sigma_a2, var, 0.1 * var);
}

TEST(FitEmpiricalBayesTest, NoiselessSignalPinsGammaHigh) {
  const Eigen::VectorXd a = SyntheticSignal(0.95, 0.1, 0.0, 2000, 4);
  const auto fit = FitEmpiricalBayes(a);
  ASSERT_TRUE(fit.ok());
  EXPECT_EQ(fit->status, EbFitStatus::kGammaAtUpperBound);
  EXPECT_LT(fit->model.sigma_a2, 1e-4 * 0.01);
  EXPECT_NEAR(fit->model.xi, 0.95, 0.02);
}

TEST(FitEmpiricalBayesTest, RecoversHyperparameters) {
  std::vector<double> xi_hat, sa2_hat;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::VectorXd a = SyntheticSignal(0.9, 0.05, 0.2, 2000, seed);
    const auto fit = FitEmpiricalBayes(a);
    ASSERT_TRUE(fit.ok());
    xi_hat.push_back(fit->model.xi);
    sa2_hat.push_back(fit->model.sigma_a2);
  }
  EXPECT_NEAR(Median(sa2_hat), 0.04, 0.2 * 0.04);
  EXPECT_NEAR(Median(xi_hat), 0.9, 0.05);
}

TEST(FitEmpiricalBayesTest, MinimizerNearTruePoleHighSnr) {
  std::vector<double> xi_hat;
  for (uint64_t seed = 100; seed < 110; ++seed) {
    const Eigen::VectorXd a =
        SyntheticSignal(0.9, std::sqrt(50.0), 1.0, 2000, seed);
    const auto fit = FitEmpiricalBayes(a);
    ASSERT_TRUE(fit.ok());
    EXPECT_NEAR(fit->model.xi, 0.9, 0.05);
  }
}

TEST(FitEmpiricalBayesTest, RejectsShortOrEmpty) {
  EXPECT_FALSE(FitEmpiricalBayes(Eigen::VectorXd::Ones(9)).ok());
  EXPECT_FALSE(FitEmpiricalBayes(Eigen::VectorXd::Zero(20)).ok());
}

TEST(FiltFiltTest, IdentityFilter) {
  const Eigen::VectorXd x = SyntheticSignal(0.5, 1.0, 1.0, 64, 2);
  EXPECT_LE((FiltFiltZeroPhase(x, 0.0, 1.0) - x).norm(), 1e-14);
}

TEST(FiltFiltTest, ConstantSignalGain) {
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(300, 2.0);
  const double beta = 0.8, c = 0.3;
  const Eigen::VectorXd y = FiltFiltZeroPhase(x, beta, c);
  const double gain = std::pow(c / (1 - beta), 2);
  for (int k = 0; k < 300; ++k) EXPECT_NEAR(y(k), 2.0 * gain, 1e-12);

  const auto coeffs = ComputeWienerCoefficients(0.9, 1.0, 1e-10);
  ASSERT_TRUE(coeffs.ok());
  EXPECT_NEAR(std::pow(coeffs->c / (1 - coeffs->beta), 2), 1.0, 1e-8);
}

TEST(FiltFiltTest, ZeroLagOnSinusoid) {
  const int n = 2000;
  const double omega = 2 * kPi * 0.013;
  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x(k) = std::sin(omega * k + 0.3);
  const Eigen::VectorXd y = FiltFiltZeroPhase(x, 0.9, 0.1);
  // Phase of the interior output relative to the input at omega.
  std::complex<double> px = 0, py = 0;
  for (int k = 400; k < 1600; ++k) {
    const std::complex<double> w = std::polar(1.0, -omega * k);
    px += x(k) * w;
    py += y(k) * w;
  }
  EXPECT_LT(std::abs(std::arg(py / px)), 1e-6);
  // Cross-correlation peak at zero lag.
  int best_lag = 99;
  double best = -1e300;
  for (int lag = -20; lag <= 20; ++lag) {
    double acc = 0;
    for (int k = 400; k < 1600; ++k) acc += x(k) * y(k + lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  EXPECT_EQ(best_lag, 0);
}

TEST(FiltFiltTest, ShortSignals) {
  Eigen::VectorXd one(1);
  one << 3.0;
  EXPECT_NEAR(FiltFiltZeroPhase(one, 0.5, 0.5)(0), 3.0, 1e-14);
  EXPECT_EQ(FiltFiltZeroPhase(Eigen::VectorXd(0), 0.5, 0.5).size(), 0);
}

TEST(WienerSmoothTest, ReducesNoise) {
  const int n = 3000;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  Eigen::VectorXd clean(n), noisy(n);
  double x = 0;
  for (int k = 0; k < n; ++k) {
    x = 0.98 * x + 0.02 * normal(rng);
    clean(k) = x;
    noisy(k) = x + 0.1 * normal(rng);
  }
  const auto smooth = WienerSmooth(noisy);
  ASSERT_TRUE(smooth.ok());
  EXPECT_LT((smooth->filtered - clean).norm(), 0.5 * (noisy - clean).norm());
}

}  // namespace
}  // namespace vmass
