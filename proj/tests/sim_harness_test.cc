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

#include "vmass/sim_harness.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "vmass/profile_search.h"

namespace vmass {
namespace {

// Bang-bang drive between 4 and 12 km/h through the actuator lag.
Profile DriveProfile(int n = 2400) {
  DesignProblem p;
  p.grid = *SamplingGrid::Create(0.01, n);
  p.actuator = *ActuatorModel::Create(0.979);
  p.bounds.a_min = -0.3;
  p.bounds.a_max = 0.9;
  p.bounds.v_min = 4.0 / 3.6;
  p.bounds.v_max = 12.0 / 3.6;
  p.v0 = p.bounds.v_min;
  const Eigen::VectorXd u = *ExpandProfileParam(
      LagAwareBangBang(p, n, p.bounds.v_min, p.bounds.v_max), n);
  return *SimulateProfile(u, p.actuator, p.grid, p.v0);
}

Profile StepProfile(int n, int saturated, double a_max) {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 0.5 * a_max);
  u.head(saturated).setConstant(a_max);
  return *SimulateProfile(u, *ActuatorModel::Create(0.9),
                          *SamplingGrid::Create(0.1, n), 0.0);
}

TEST(SimConfigTest, Validate) {
  SimConfig c;
  EXPECT_TRUE(c.Validate().ok());
  c.trials = 0;
  EXPECT_FALSE(c.Validate().ok());
  c = SimConfig();
  c.sigma_e = -1.0;
  EXPECT_FALSE(c.Validate().ok());
  c = SimConfig();
  c.m_true = 0.0;
  EXPECT_FALSE(c.Validate().ok());
}

TEST(SynthesizeLogTest, NoiselessIsExactAffine) {
  const Profile prof = DriveProfile(500);
  SimConfig c;
  c.delta_true = 200.0;
  const auto log = SynthesizeLog(prof, c, 0);
  ASSERT_TRUE(log.ok());
  ASSERT_TRUE(log->Validate().ok());
  for (int k = 0; k < 500; ++k) {
    EXPECT_EQ(log->a_meas(k), prof.a(k));
    EXPECT_EQ(log->f_res(k), c.m_true * prof.a(k) + 200.0);
    EXPECT_DOUBLE_EQ(log->t(k), (k + 1) * 0.01);
  }
}

TEST(SynthesizeLogTest, ForceNoiseVariance) {
  Profile prof = StepProfile(100000, 100, 1.0);
  SimConfig c;
  c.sigma_e = 100.0;
  c.delta_true = 50.0;
  c.seed = 11;
  const auto log = SynthesizeLog(prof, c, 3);
  ASSERT_TRUE(log.ok());
  const Eigen::VectorXd e =
      log->f_res - c.m_true * prof.a - Eigen::VectorXd::Constant(100000, 50.0);
  const double mean = e.mean();
  const double var = (e.array() - mean).square().sum() / (e.size() - 1);
  EXPECT_NEAR(var / 1e4, 1.0, 0.03);
}

TEST(SynthesizeLogTest, StreamsAreKeyedBySeedAndTrial) {
  const Profile prof = DriveProfile(300);
  SimConfig c;
  c.sigma_e = 10.0;
  c.sigma_a_meas = 0.1;
  c.seed = 5;
  const DriveLog a = *SynthesizeLog(prof, c, 7);
  const DriveLog b = *SynthesizeLog(prof, c, 7);
  EXPECT_EQ(a.f_res, b.f_res);
  EXPECT_EQ(a.a_meas, b.a_meas);
  EXPECT_NE(a.f_res, SynthesizeLog(prof, c, 8)->f_res);
  c.seed = 6;
  EXPECT_NE(a.f_res, SynthesizeLog(prof, c, 7)->f_res);
  std::set<uint64_t> seen;
  for (uint64_t s = 0; s < 20; ++s) {
    for (uint64_t t = 0; t < 50; ++t) seen.insert(TrialStreamSeed(s, t));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(RunPipelineTest, NoiselessRecoversMass) {
  const Profile prof = DriveProfile(800);
  SimConfig c;
  c.delta_true = -120.0;
  const DriveLog log = *SynthesizeLog(prof, c, 0);
  PipelineOptions o;
  o.use_offset = true;
  o.r_designed = 0.5 * prof.a.squaredNorm();
  const auto r = RunPipeline(log, o);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->estimate.m_hat, c.m_true, 1e-6);
  EXPECT_NEAR(*r->estimate.delta_hat, -120.0, 1e-6);
  ASSERT_GT(r->first_index_reaching, 1);
  const Eigen::VectorXd& tr = r->estimate.r_trace;
  EXPECT_GE(tr(r->first_index_reaching - 1), o.r_designed);
  EXPECT_LT(tr(r->first_index_reaching - 2), o.r_designed);
  o.use_offset = false;
  c.delta_true = 0.0;
  EXPECT_NEAR(RunPipeline(*SynthesizeLog(prof, c, 0), o)->estimate.m_hat,
              c.m_true, 1e-6);
}

TEST(RunPipelineTest, RejectsMalformedLog) {
  DriveLog log;
  log.t = Eigen::Vector3d(0.1, 0.2, 0.4);
  log.a_meas = Eigen::Vector3d(1, 2, 3);
  log.f_res = Eigen::Vector3d(1, 2, 3);
  EXPECT_FALSE(RunPipeline(log, {}).ok());
  log.t = Eigen::Vector3d(0.1, 0.2, 0.3);
  log.f_res = Eigen::Vector2d(1, 2);
  EXPECT_FALSE(RunPipeline(log, {}).ok());
}

// Noisy regressors bias plain least squares towards zero by the factor
// sum a^2 / (sum a^2 + N sigma_a^2); smoothing first removes most of it.
TEST(RunPipelineTest, AttenuationBiasAndWienerCorrection) {
  const Profile prof = DriveProfile();
  SimConfig c;
  c.sigma_e = 200.0;
  c.sigma_a_meas = 0.3;
  c.seed = 21;
  const int trials = 200;
  double raw_sum = 0.0, wiener_sum = 0.0, raw_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const DriveLog log = *SynthesizeLog(prof, c, i);
    PipelineOptions o;
    const double raw = RunPipeline(log, o)->estimate.m_hat;
    o.use_wiener = true;
    const double filt = RunPipeline(log, o)->estimate.m_hat;
    raw_sum += raw;
    raw_sq += raw * raw;
    wiener_sum += filt;
  }
  const double raw_mean = raw_sum / trials;
  const double raw_sd =
      std::sqrt((raw_sq - trials * raw_mean * raw_mean) / (trials - 1));
  const double r = prof.a.squaredNorm();
  const double attenuation = r / (r + prof.a.size() * 0.09);
  EXPECT_NEAR(raw_mean / c.m_true, attenuation, 0.02);
  EXPECT_LT((raw_mean - c.m_true) / (raw_sd / std::sqrt(trials)), -5.0);
  EXPECT_LT(std::abs(wiener_sum / trials - c.m_true),
            0.5 * std::abs(raw_mean - c.m_true));
}

TEST(MonteCarloTest, NoiselessIsFullyCovered) {
  const Profile prof = DriveProfile(1500);
  SimConfig c;
  c.trials = 20;
  QualityTarget t;
  t.r_designed = prof.a.squaredNorm() * (1.0 - 1e-10);
  t.sigma_e2 = 1e4;
  t.chi2 = 6.63;
  const auto rep = MonteCarlo(prof, c, t);
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep->fraction, 1.0);
  EXPECT_EQ(rep->standard_error, 0.0);
  EXPECT_EQ(rep->m_hat.size(), 20u);
  EXPECT_EQ(rep->reached, 20);
  EXPECT_NEAR(rep->mean_time_to_r, 15.0, 1e-9);
  EXPECT_NEAR(rep->mean_distance_to_r, prof.d(1499), 1e-12);
}

QualityTarget CalibratedTarget(const Profile& prof, double sigma_e) {
  QualityTarget t;
  t.alpha = 0.99;
  t.n_params = 2;
  t.chi2 = 9.21;
  t.m_nominal = 15500.0;
  t.sigma_e2 = sigma_e * sigma_e;
  t.r_designed = 0.95 * prof.a.squaredNorm();
  return t;
}

TEST(MonteCarloTest, CalibratedCoverage) {
  const Profile prof = DriveProfile();
  SimConfig c;
  c.sigma_e = 1000.0;
  c.delta_true = 200.0;
  c.trials = 1000;
  c.seed = 3;
  const auto rep = MonteCarlo(prof, c, CalibratedTarget(prof, 1000.0));
  ASSERT_TRUE(rep.ok());
  EXPECT_GE(rep->fraction, 0.99 - 3.0 * std::max(rep->standard_error,
                                                  std::sqrt(0.99 * 0.01 / 1000)));
  EXPECT_GE(rep->fraction_per_trial, 0.97);
  EXPECT_NEAR(rep->pooled_sigma_e2 / 1e6, 1.0, 0.02);
  double mean = 0.0;
  for (double m : rep->m_hat) mean += m;
  EXPECT_LT(std::abs(mean / 1000 - 15500.0) / 15500.0, 0.01);
  EXPECT_GT(rep->reached, 0);
}

TEST(MonteCarloTest, UnderestimatedNoiseLosesCoverage) {
  const Profile prof = DriveProfile();
  SimConfig c;
  c.sigma_e = 2000.0;
  c.delta_true = 200.0;
  c.trials = 1000;
  const auto rep = MonteCarlo(prof, c, CalibratedTarget(prof, 1000.0));
  ASSERT_TRUE(rep.ok());
  EXPECT_LT(rep->fraction, 0.99);
  // The per-trial band uses the estimated noise and recovers.
  EXPECT_GT(rep->fraction_per_trial, rep->fraction);
}

TEST(MonteCarloTest, Reproducible) {
  const Profile prof = DriveProfile(1000);
  SimConfig c;
  c.sigma_e = 500.0;
  c.trials = 30;
  c.seed = 99;
  const QualityTarget t = CalibratedTarget(prof, 500.0);
  const auto a = MonteCarlo(prof, c, t);
  const auto b = MonteCarlo(prof, c, t);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->m_hat, b->m_hat);
  EXPECT_EQ(a->fraction, b->fraction);
}

TEST(MonteCarloTest, RequiresEnoughExcitation) {
  const Profile prof = DriveProfile(500);
  QualityTarget t;
  t.r_designed = 2.0 * prof.a.squaredNorm();
  t.sigma_e2 = 1.0;
  t.chi2 = 1.0;
  EXPECT_EQ(MonteCarlo(prof, SimConfig(), t).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

// Longer saturation raises the acceleration at every sample, so the target
// is reached no later.
TEST(TimeToTargetTest, NonIncreasingInSaturation) {
  int previous = 1 << 30;
  for (int sat = 0; sat <= 200; sat += 20) {
    const Profile prof = StepProfile(200, sat, 0.8);
    const DriveLog log = *SynthesizeLog(prof, SimConfig(), 0);
    PipelineOptions o;
    o.r_designed = 20.0;
    const auto r = RunPipeline(log, o);
    ASSERT_TRUE(r.ok());
    ASSERT_GT(r->first_index_reaching, 0);
    EXPECT_LE(r->first_index_reaching, previous) << sat;
    previous = r->first_index_reaching;
  }
}

}  // namespace
}  // namespace vmass
