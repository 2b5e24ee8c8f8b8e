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
#include <limits>
#include <random>

#include "absl/strings/str_cat.h"

namespace vmass {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

absl::Status SimConfig::Validate() const {
  if (!(m_true > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("m_true must be positive, got ", m_true));
  }
  if (!(sigma_e >= 0.0) || !(sigma_a_meas >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise stds must be >= 0, got sigma_e=", sigma_e,
        " sigma_a_meas=", sigma_a_meas));
  }
  if (trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be >= 1, got ", trials));
  }
  if (!std::isfinite(delta_true)) {
    return absl::InvalidArgumentError("delta_true must be finite");
  }
  return absl::OkStatus();
}

uint64_t TrialStreamSeed(uint64_t seed, uint64_t trial_index) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(~trial_index));
}

absl::StatusOr<DriveLog> SynthesizeLog(const Profile& profile,
                                       const SimConfig& config,
                                       uint64_t trial_index) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const Eigen::Index n = profile.a.size();
  if (n == 0 || !(profile.grid.ts > 0.0)) {
    return absl::InvalidArgumentError("profile is empty");
  }
  std::mt19937_64 rng(TrialStreamSeed(config.seed, trial_index));
  std::normal_distribution<double> normal;
  DriveLog log;
  log.t.resize(n);
  log.a_meas.resize(n);
  log.f_res.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    // Fixed draw order: force noise, then accelerometer noise.
    const double e = config.sigma_e * normal(rng);
    const double e_a = config.sigma_a_meas * normal(rng);
    log.t(k) = static_cast<double>(k + 1) * profile.grid.ts;
    log.f_res(k) = config.m_true * profile.a(k) + config.delta_true + e;
    log.a_meas(k) = profile.a(k) + e_a;
  }
  return log;
}

absl::StatusOr<PipelineResult> RunPipeline(const DriveLog& log,
                                           const PipelineOptions& options) {
  if (absl::Status s = log.Validate(); !s.ok()) return s;
  PipelineResult out;
  out.regressor = log.a_meas;
  if (options.use_wiener) {
    absl::StatusOr<SmoothedSignal> smooth = WienerSmooth(log.a_meas, options.eb);
    if (!smooth.ok()) return smooth.status();
    out.regressor = std::move(smooth->filtered);
    out.wiener = smooth->fit;
  }
  absl::StatusOr<MassEstimate> est =
      options.use_offset ? EstimateWithOffset(out.regressor, log.f_res)
                         : EstimateMass(out.regressor, log.f_res);
  if (!est.ok()) return est.status();
  out.estimate = *std::move(est);
  if (options.r_designed > 0.0) {
    const Eigen::VectorXd& r = out.estimate.r_trace;
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      if (r(k) >= options.r_designed) {
        out.first_index_reaching = static_cast<int>(k + 1);
        break;
      }
    }
  }
  return out;
}

absl::StatusOr<CoverageReport> MonteCarlo(const Profile& profile,
                                          const SimConfig& config,
                                          const QualityTarget& target,
                                          const CoverageOptions& options) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (absl::Status s = target.Validate(); !s.ok()) return s;
  if (!(target.r_designed > 0.0)) {
    return absl::InvalidArgumentError("target.r_designed must be positive");
  }
  const double r_profile = profile.a.squaredNorm();
  if (r_profile < target.r_designed * (1.0 - 1e-12)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "profile excitation ", r_profile, " is below r_designed ",
        target.r_designed));
  }
  const bool offset = config.delta_true != 0.0;
  double chi2 = target.chi2;
  if (!(chi2 > 0.0)) {
    absl::StatusOr<double> c = Chi2Percentile(target.alpha, offset ? 2 : 1);
    if (!c.ok()) return c.status();
    chi2 = *c;
  }
  const double m0 = target.m_nominal > 0.0 ? target.m_nominal : config.m_true;
  const double sigma_e2 = target.sigma_e2 > 0.0
                              ? target.sigma_e2
                              : config.sigma_e * config.sigma_e;
  auto band = [&](double s2, double r) {
    return std::sqrt(s2 * chi2 / (m0 * m0 * r));
  };

  CoverageReport rep;
  rep.designed_relative_error = band(sigma_e2, target.r_designed);
  PipelineOptions popt;
  popt.use_wiener = options.use_wiener;
  popt.use_offset = offset;
  popt.r_designed = target.r_designed;
  popt.eb = options.eb;
  std::vector<double> r_final;
  double time_sum = 0.0, dist_sum = 0.0;
  int within_trial = 0;
  for (int i = 0; i < config.trials; ++i) {
    absl::StatusOr<DriveLog> log =
        SynthesizeLog(profile, config, static_cast<uint64_t>(i));
    if (!log.ok()) return log.status();
    absl::StatusOr<PipelineResult> res = RunPipeline(*log, popt);
    if (!res.ok()) return res.status();
    const MassEstimate& est = res->estimate;
    const double rel = std::abs(est.m_hat - config.m_true) / config.m_true;
    rep.m_hat.push_back(est.m_hat);
    rep.sigma_e2_hat.push_back(est.sigma_e2_hat);
    r_final.push_back(est.r_trace(est.r_trace.size() - 1));
    if (rel <= rep.designed_relative_error) ++rep.within;
    if (rel <= band(est.sigma_e2_hat, r_final.back())) ++within_trial;
    if (res->first_index_reaching > 0) {
      const int k = res->first_index_reaching;
      time_sum += log->t(k - 1);
      dist_sum += k - 1 < profile.d.size() ? profile.d(k - 1) : 0.0;
      ++rep.reached;
    }
  }
  const double trials = config.trials;
  rep.fraction = rep.within / trials;
  rep.standard_error = std::sqrt(rep.fraction * (1.0 - rep.fraction) / trials);
  rep.fraction_per_trial = within_trial / trials;
  double pooled = 0.0;
  for (double s2 : rep.sigma_e2_hat) pooled += s2;
  rep.pooled_sigma_e2 = pooled / trials;
  int within_pooled = 0;
  const double pooled_band = band(rep.pooled_sigma_e2, target.r_designed);
  for (double m : rep.m_hat) {
    if (std::abs(m - config.m_true) / config.m_true <= pooled_band) {
      ++within_pooled;
    }
  }
  rep.fraction_pooled = within_pooled / trials;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.mean_time_to_r = rep.reached > 0 ? time_sum / rep.reached : nan;
  rep.mean_distance_to_r = rep.reached > 0 ? dist_sum / rep.reached : nan;
  return rep;
}

}  // namespace vmass
