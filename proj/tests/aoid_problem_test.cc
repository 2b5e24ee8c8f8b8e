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

#include "vmass/aoid_problem.h"

#include <random>

#include "gtest/gtest.h"

namespace vmass {
namespace {

DesignProblem SmallProblem(int n, double pole, double ts) {
  DesignProblem p;
  p.objective = Objective::kMinDistance;
  p.grid = *SamplingGrid::Create(ts, n);
  p.actuator = *ActuatorModel::Create(pole);
  p.bounds.a_min = -0.3;
  p.bounds.a_max = 0.9;
  p.bounds.v_min = 4.0 / 3.6;
  p.bounds.v_max = 12.0 / 3.6;
  p.target.r_designed = 1.0;
  p.v0 = p.bounds.v_min;
  return p;
}

Eigen::VectorXd RandomInput(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd u(n);
  for (auto& x : u) x = unif(rng);
  return u;
}

TEST(ObjectiveTest, ParseRoundTrip) {
  for (Objective o : {Objective::kMinTime, Objective::kMinDistance,
                      Objective::kMaxAccuracy}) {
    EXPECT_EQ(*ParseObjective(ToString(o)), o);
  }
  EXPECT_FALSE(ParseObjective("fastest").ok());
}

TEST(BoundsTest, Validation) {
  Bounds b{-0.3, 0.9, 1.0, 3.0};
  EXPECT_TRUE(b.Validate().ok());
  EXPECT_EQ(b.UMin(), -0.3);
  EXPECT_EQ(b.UMax(), 0.9);
  Bounds bad = b;
  bad.a_min = 0.1;
  EXPECT_FALSE(bad.Validate().ok());
  bad = b;
  bad.v_max = 0.5;
  EXPECT_FALSE(bad.Validate().ok());
  bad = b;
  bad.varying = {{5.0}, {2.0}};
  EXPECT_FALSE(bad.Validate().ok());
}

TEST(AssembleConstraintsTest, ScalarIdentityCase) {
  DesignProblem p = SmallProblem(1, 0.0, 1.0);
  p.target.r_designed = 0.25;
  const auto sys = AssembleConstraints(p);
  ASSERT_TRUE(sys.ok());
  EXPECT_DOUBLE_EQ(sys->quality(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sys->r_designed, 0.25);
  ASSERT_EQ(sys->linear.a.rows(), 6);
  EXPECT_DOUBLE_EQ(sys->linear.a(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sys->linear.b(0), 0.9);
  EXPECT_DOUBLE_EQ(sys->linear.a(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(sys->linear.b(1), 0.3);
}

TEST(AssembleConstraintsTest, VehicleSettingsBuild) {
  DesignProblem p = SmallProblem(40, 0.979, 0.01);
  auto sys = AssembleConstraints(p);
  ASSERT_TRUE(sys.ok());
  EXPECT_EQ(sys->linear.a.rows(), 6 * 40);
  p.bounds.d_max = 60.0;
  sys = AssembleConstraints(p);
  ASSERT_TRUE(sys.ok());
  EXPECT_EQ(sys->linear.a.rows(), 6 * 40 + 1);
  EXPECT_EQ(sys->linear.kinds.back(), RowKind::kDistance);
}

TEST(AssembleConstraintsTest, RejectsInitialVelocityOutsideRange) {
  DesignProblem p = SmallProblem(5, 0.5, 0.1);
  p.v0 = p.bounds.v_max + 0.1;
  EXPECT_FALSE(AssembleConstraints(p).ok());
  p.v0 = p.bounds.v_min - 0.1;
  EXPECT_FALSE(AssembleConstraints(p).ok());
}

TEST(AssembleConstraintsTest, FirstViolatedVelocitySample) {
  DesignProblem p = SmallProblem(30, 0.6, 0.5);
  const auto sys = AssembleConstraints(p);
  ASSERT_TRUE(sys.ok());
  // Full throttle overshoots v_max at some sample.
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(30, 0.9);
  const auto prof = SimulateProfile(u, p.actuator, p.grid, p.v0);
  ASSERT_TRUE(prof.ok());
  int expected = 0;
  for (int k = 0; k < 30 && expected == 0; ++k) {
    if (prof->v(k) > p.bounds.v_max + 1e-12) expected = k + 1;
  }
  ASSERT_GT(expected, 0);
  const auto first = FirstViolatedRow(sys->linear, u, 1e-12);
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(first->kind, RowKind::kVelocityUpper);
  EXPECT_EQ(first->sample, expected);

  // Zero input keeps v = v0 = v_min: every row holds.
  EXPECT_FALSE(
      FirstViolatedRow(sys->linear, Eigen::VectorXd::Zero(30), 1e-12));
}

TEST(AssembleConstraintsTest, DistanceRowMatchesSimulation) {
  DesignProblem p = SmallProblem(25, 0.8, 0.2);
  std::mt19937_64 rng(4);
  const Eigen::VectorXd u = RandomInput(25, -0.3, 0.9, rng);
  const auto sys = AssembleConstraints(p);
  const auto prof = SimulateProfile(u, p.actuator, p.grid, p.v0);
  ASSERT_TRUE(sys.ok() && prof.ok());
  EXPECT_NEAR(sys->distance_cost.dot(u) + sys->distance_offset, prof->d(24),
              1e-12);
  EXPECT_NEAR(u.dot(sys->quality * u), prof->a.squaredNorm(), 1e-12);
}

TEST(CheckFeasibilityTest, ZeroInputShortfall) {
  DesignProblem p = SmallProblem(10, 0.5, 0.1);
  p.target.r_designed = 3.0;
  const auto rep = CheckFeasibility(Eigen::VectorXd::Zero(10), p, 1e-9);
  ASSERT_TRUE(rep.ok());
  EXPECT_FALSE(rep->feasible);
  EXPECT_DOUBLE_EQ(rep->excitation_shortfall, 3.0);
  EXPECT_EQ(rep->velocity.worst, 0.0);
}

TEST(CheckFeasibilityTest, InputViolationIndex) {
  DesignProblem p = SmallProblem(10, 0.5, 0.01);
  p.target.r_designed = 0.0;
  Eigen::VectorXd u = Eigen::VectorXd::Constant(10, 0.1);
  u(6) = 1.2;
  const auto rep = CheckFeasibility(u, p, 1e-9);
  ASSERT_TRUE(rep.ok());
  EXPECT_FALSE(rep->feasible);
  EXPECT_EQ(rep->input.first_sample, 7);
  EXPECT_NEAR(rep->input.worst, 0.3, 1e-12);
}

TEST(CheckFeasibilityTest, AgreesWithLinearRows) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 30; ++inst) {
    const int n = 1 + inst % 6;
    DesignProblem p = SmallProblem(n, 0.9 * unif(rng), 0.2 + unif(rng));
    p.bounds.v_max = p.bounds.v_min + 0.3 + unif(rng);
    p.bounds.d_max = p.v0 * n * p.grid.ts + 0.2;
    const auto sys = AssembleConstraints(p);
    ASSERT_TRUE(sys.ok());
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd u = RandomInput(n, -0.5, 1.1, rng);
      const auto rep = CheckFeasibility(u, p, 0.0);
      ASSERT_TRUE(rep.ok());
      const Eigen::VectorXd slack = sys->linear.a * u - sys->linear.b;
      double acc = 0, vel = 0, inp = 0, dist = 0;
      for (int r = 0; r < slack.size(); ++r) {
        const double v = std::max(0.0, slack(r));
        switch (sys->linear.kinds[r]) {
          case RowKind::kAccelUpper:
          case RowKind::kAccelLower:
            acc = std::max(acc, v);
            break;
          case RowKind::kVelocityUpper:
          case RowKind::kVelocityLower:
            vel = std::max(vel, v);
            break;
          case RowKind::kInputUpper:
          case RowKind::kInputLower:
            inp = std::max(inp, v);
            break;
          case RowKind::kDistance:
            dist = std::max(dist, v);
            break;
        }
      }
      EXPECT_NEAR(rep->acceleration.worst, acc, 1e-9);
      EXPECT_NEAR(rep->velocity.worst, vel, 1e-9);
      EXPECT_NEAR(rep->input.worst, inp, 1e-9);
      EXPECT_NEAR(rep->distance.worst, dist, 1e-9);
    }
  }
}

TEST(VaryingBoundsTest, ResolvedByDistance) {
  Bounds b{-0.3, 0.9, 1.0, 3.0};
  BoundSegment seg;
  seg.d_from = 2.0;
  seg.v_max = 2.0;
  seg.a_max = 0.5;
  b.varying = {seg};
  ASSERT_TRUE(b.Validate().ok());
  Eigen::VectorXd d(4);
  d << 0.5, 1.9, 2.0, 3.5;
  const SampleBounds sb = ResolveSampleBounds(b, 4, d);
  EXPECT_EQ(sb.v_max(0), 3.0);
  EXPECT_EQ(sb.v_max(1), 3.0);
  EXPECT_EQ(sb.v_max(2), 2.0);
  EXPECT_EQ(sb.a_max(3), 0.5);
  EXPECT_EQ(sb.a_min(3), -0.3);
}

TEST(LiftProblemTest, ScalarVelocityRow) {
  DesignProblem p = SmallProblem(1, 0.0, 0.7);
  p.v0 = 0.0;
  p.bounds.v_min = 0.0;
  const auto lifted = LiftProblem(p);
  ASSERT_TRUE(lifted.ok());
  EXPECT_EQ(lifted->NumVariables(), 1 + 1 + 1);
  const LiftedRow& vel = lifted->rows[1];
  EXPECT_EQ(vel.label, "velocity[1]");
  EXPECT_NEAR(vel.q(0, 0), 0.49, 1e-15);
  EXPECT_NEAR(vel.linear(0), -(p.bounds.v_min + p.bounds.v_max) * 0.7, 1e-15);
  EXPECT_NEAR(vel.constant, p.bounds.v_min * p.bounds.v_max, 1e-15);
}

TEST(LiftProblemTest, SubstitutionSoundness) {
  std::mt19937_64 rng(31);
  for (int inst = 0; inst < 5; ++inst) {
    const int n = 3 + inst % 3;
    DesignProblem p = SmallProblem(n, 0.5, 0.5);
    p.target.r_designed = 0.2;
    p.bounds.d_max = p.v0 * n * p.grid.ts + 0.5;
    const auto lifted = LiftProblem(p);
    ASSERT_TRUE(lifted.ok());
    EXPECT_EQ(lifted->NumVariables(), n * (n + 1) / 2 + n + 1);
    int feasible_seen = 0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd u = RandomInput(n, -0.4, 1.0, rng);
      const auto rep = CheckFeasibility(u, p, 0.0);
      ASSERT_TRUE(rep.ok());
      const Eigen::VectorXd vals =
          EvaluateLiftedRows(*lifted, u * u.transpose(), u);
      const bool lifted_ok = vals.maxCoeff() <= 1e-12;
      EXPECT_EQ(rep->feasible, lifted_ok) << "max row " << vals.maxCoeff();
      feasible_seen += rep->feasible;
    }
    EXPECT_GT(feasible_seen, 0);
  }
}

TEST(LiftProblemTest, VelocityViolationSign) {
  DesignProblem p = SmallProblem(3, 0.3, 1.0);
  p.target.r_designed = 0.0;
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 0.9);
  const auto rep = CheckFeasibility(u, p, 0.0);
  ASSERT_TRUE(rep.ok());
  ASSERT_GT(rep->velocity.worst, 0.0);
  const auto lifted = LiftProblem(p);
  const Eigen::VectorXd vals =
      EvaluateLiftedRows(*lifted, u * u.transpose(), u);
  const int k = rep->velocity.first_sample;
  EXPECT_GT(vals(3 + k - 1), 0.0);
}

TEST(LiftProblemTest, ObjectivesAndVaryingRejected) {
  DesignProblem p = SmallProblem(4, 0.5, 0.5);
  p.objective = Objective::kMaxAccuracy;
  auto lifted = LiftProblem(p);
  ASSERT_TRUE(lifted.ok());
  EXPECT_LT(lifted->cost_q.trace(), 0.0);
  p.bounds.varying = {{1.0}};
  EXPECT_FALSE(LiftProblem(p).ok());
}

TEST(VerifyRankOneTest, Cases) {
  Eigen::VectorXd u(3);
  u << 0.5, -1.0, 2.0;
  const RankOneCheck exact = VerifyRankOne(u * u.transpose(), u, 1e-9);
  EXPECT_TRUE(exact.is_rank_one);
  EXPECT_LE((exact.recovered_u - u).norm(), 1e-12);
  EXPECT_NEAR(exact.nuclear_norm, 1.0 + u.squaredNorm(), 1e-12);

  const RankOneCheck perturbed = VerifyRankOne(
      u * u.transpose() + Eigen::MatrixXd::Identity(3, 3), u, 1e-9);
  EXPECT_FALSE(perturbed.is_rank_one);
  EXPECT_GT(perturbed.nuclear_norm, 1.0 + u.squaredNorm());
}

}  // namespace
}  // namespace vmass
