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

#include "vmass/bnb_solver.h"

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.h"

namespace vmass {
namespace {

using ::vmass::testing::GridSearch;
using ::vmass::testing::RandomCost;
using ::vmass::testing::RandomInstance;
using ::vmass::testing::ReverseConvexMinCost;
using ::vmass::testing::VertexMaxExcitation;

// Velocity limits wide enough never to bind.
DesignProblem BoxProblem(int n, double pole, double lo, double hi) {
  DesignProblem p;
  p.objective = Objective::kMaxAccuracy;
  p.grid = *SamplingGrid::Create(0.1, n);
  p.actuator = *ActuatorModel::Create(pole);
  p.bounds.a_min = lo;
  p.bounds.a_max = hi;
  p.bounds.v_min = -1e3;
  p.bounds.v_max = 1e3;
  p.v0 = 0.0;
  return p;
}

void ExpectCertificate(const SolveReport& rep) {
  EXPECT_LE(rep.lower_bound, rep.objective_value + 1e-9);
  EXPECT_GE(rep.upper_bound, rep.objective_value - 1e-9);
  EXPECT_TRUE(rep.verified);
}

TEST(MaxExcitationTest, ScalarVertex) {
  const auto rep = MaxExcitation(BoxProblem(1, 0.0, -1.0, 2.0));
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep->status, SolveStatus::kOptimal);
  EXPECT_NEAR(rep->objective_value, 4.0, 1e-9);
  EXPECT_NEAR(rep->u_star(0), 2.0, 1e-9);
  ExpectCertificate(*rep);
}

TEST(MaxExcitationTest, TwoSampleBoxMatchesVertices) {
  const DesignProblem p = BoxProblem(2, 0.5, -1.0, 1.0);
  const auto rep = MaxExcitation(p);
  ASSERT_TRUE(rep.ok());
  // With unit input bounds the reachable accelerations are F [-1,1]^2.
  double best = 0;
  const Eigen::MatrixXd f = BuildActuatorToeplitz(p.actuator, p.grid);
  for (double u1 : {-1.0, 1.0})
    for (double u2 : {-1.0, 1.0})
      best = std::max(best, (f * Eigen::Vector2d(u1, u2)).squaredNorm());
  EXPECT_NEAR(rep->objective_value, best, 1e-9);
  EXPECT_NEAR(std::abs(rep->u_star(0)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(rep->u_star(1)), 1.0, 1e-9);
  ExpectCertificate(*rep);
}

TEST(MaxExcitationTest, RandomInstancesMatchOracles) {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const int n = 2 + seed % 2;
    const DesignProblem p = RandomInstance(seed, n);
    const auto sys = AssembleConstraints(p);
    ASSERT_TRUE(sys.ok());
    const auto grid = GridSearch(*sys, p.bounds.UMin(), p.bounds.UMax(), 0.01,
                                 true, Eigen::VectorXd());
    const auto vert = VertexMaxExcitation(*sys);
    ASSERT_TRUE(vert.feasible);
    const double oracle = std::max(grid.value, vert.value);
    const auto rep = MaxExcitation(p);
    ASSERT_TRUE(rep.ok());
    EXPECT_EQ(rep->status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(rep->objective_value, oracle, 1e-3) << "seed " << seed;
    EXPECT_LE(rep->upper_bound - rep->lower_bound,
              1e-4 * std::max(1.0, rep->upper_bound) + 1e-12);
    ExpectCertificate(*rep);
  }
}

TEST(MaxExcitationTest, MonotoneInHorizon) {
  DesignProblem p = RandomInstance(77, 1);
  p.bounds.d_max.reset();
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    p.grid.n = n;
    const auto rep = MaxExcitation(p);
    ASSERT_TRUE(rep.ok());
    EXPECT_GE(rep->objective_value, prev - 1e-9);
    prev = rep->objective_value;
  }
}

TEST(MaxExcitationTest, Deterministic) {
  const DesignProblem p = RandomInstance(5, 4);
  const auto a = MaxExcitation(p);
  const auto b = MaxExcitation(p);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->nodes_explored, b->nodes_explored);
  EXPECT_EQ(a->objective_value, b->objective_value);
  EXPECT_EQ(a->upper_bound, b->upper_bound);
  EXPECT_EQ((a->u_star - b->u_star).norm(), 0.0);
}

TEST(MaxExcitationTest, RejectsLargeHorizon) {
  EXPECT_FALSE(MaxExcitation(BoxProblem(65, 0.5, -1, 1)).ok());
}

TEST(MaxExcitationTest, BudgetExhaustedKeepsValidBounds) {
  const DesignProblem p = RandomInstance(9, 4);
  BnbSettings s;
  s.node_budget = 2;
  s.tol = 0.0;
  const auto rep = MaxExcitation(p, s);
  ASSERT_TRUE(rep.ok());
  if (rep->status == SolveStatus::kBudgetExhausted) {
    EXPECT_GE(rep->upper_bound, rep->objective_value);
    EXPECT_GE(rep->gap, 0.0);
  }
  ExpectCertificate(*rep);
}

TEST(SolveLinearCostTest, ScalarFarPoint) {
  DesignProblem p = BoxProblem(1, 0.0, -1.0, 2.0);
  p.target.r_designed = 1.0;
  const auto rep = SolveLinearCost(p, Eigen::VectorXd::Constant(1, 0.5), 0.0);
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep->status, SolveStatus::kOptimal);
  EXPECT_NEAR(rep->u_star(0), -1.0, 1e-9);
  EXPECT_NEAR(rep->objective_value, -0.5, 1e-9);
  ExpectCertificate(*rep);
}

TEST(SolveLinearCostTest, InfeasibleAboveMaxExcitation) {
  DesignProblem p = RandomInstance(3, 3);
  const auto best = MaxExcitation(p);
  ASSERT_TRUE(best.ok());
  p.target.r_designed = best->upper_bound * 1.001 + 1e-6;
  const auto rep = SolveLinearCost(p, RandomCost(3, 3, 0.05), 0.0);
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep->status, SolveStatus::kInfeasible);
  ASSERT_TRUE(rep->excitation_bound.has_value());
  EXPECT_LT(*rep->excitation_bound, p.target.r_designed);
}

TEST(SolveLinearCostTest, RandomInstancesMatchGrid) {
  for (uint64_t seed = 20; seed < 32; ++seed) {
    const int n = 2 + seed % 2;
    DesignProblem p = RandomInstance(seed, n);
    const auto sys0 = AssembleConstraints(p);
    const auto vert = VertexMaxExcitation(*sys0);
    ASSERT_TRUE(vert.feasible);
    p.target.r_designed = (0.3 + 0.05 * (seed % 10)) * vert.value;
    const auto sys = AssembleConstraints(p);
    const Eigen::VectorXd cost = RandomCost(seed, n, 0.05);
    const auto grid = GridSearch(*sys, p.bounds.UMin(), p.bounds.UMax(), 0.01,
                                 false, cost);
    const auto rep = SolveLinearCost(p, cost, 0.0);
    ASSERT_TRUE(rep.ok());
    ASSERT_TRUE(grid.feasible) << "seed " << seed;
    EXPECT_EQ(rep->status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(rep->objective_value, grid.value, 1e-3) << "seed " << seed;
    ExpectCertificate(*rep);
  }
}

TEST(SolveLinearCostTest, MatchesEdgeEnumeration) {
  // Costs large enough that a 0.01 grid would be off by more than 1e-3.
  for (uint64_t seed = 60; seed < 72; ++seed) {
    const int n = 1 + seed % 4;
    DesignProblem p = RandomInstance(seed, n);
    const auto vert = VertexMaxExcitation(*AssembleConstraints(p));
    ASSERT_TRUE(vert.feasible);
    p.target.r_designed = (0.4 + 0.04 * (seed % 10)) * vert.value;
    const auto sys = AssembleConstraints(p);
    const Eigen::VectorXd cost = RandomCost(seed, n, 5.0);
    const auto exact = ReverseConvexMinCost(*sys, cost);
    ASSERT_TRUE(exact.feasible) << "seed " << seed;
    const auto rep = SolveLinearCost(p, cost, 0.0);
    ASSERT_TRUE(rep.ok());
    EXPECT_EQ(rep->status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(rep->objective_value, exact.value, 1e-6) << "seed " << seed;
    ExpectCertificate(*rep);
  }
}

TEST(SolveFixedHorizonTest, MinDistanceUsesDistanceCost) {
  DesignProblem p = RandomInstance(41, 3);
  p.objective = Objective::kMinDistance;
  p.bounds.d_max.reset();
  const auto vert = VertexMaxExcitation(*AssembleConstraints(p));
  p.target.r_designed = 0.5 * vert.value;
  const auto rep = SolveFixedHorizon(p);
  ASSERT_TRUE(rep.ok());
  ASSERT_EQ(rep->status, SolveStatus::kOptimal);
  const auto prof = SimulateProfile(rep->u_star, p.actuator, p.grid, p.v0);
  EXPECT_NEAR(rep->objective_value, prof->d(2), 1e-9);
  ExpectCertificate(*rep);
}

TEST(SolveFixedHorizonTest, VaryingBoundsConverge) {
  DesignProblem p = BoxProblem(6, 0.3, -0.5, 0.5);
  p.objective = Objective::kMinDistance;
  p.grid.ts = 0.5;
  p.bounds.v_min = 0.5;
  p.bounds.v_max = 1.5;
  p.v0 = 1.0;
  BoundSegment seg;
  seg.d_from = 1.0;
  seg.a_max = 0.3;
  p.bounds.varying = {seg};
  p.target.r_designed = 0.2;
  const auto rep = SolveFixedHorizon(p);
  ASSERT_TRUE(rep.ok());
  EXPECT_NE(rep->status, SolveStatus::kInfeasible);
  EXPECT_NE(rep->message.find("varying bounds"), std::string::npos);
  EXPECT_TRUE(rep->verified) << rep->message;
}

TEST(SolveMinTimeTest, DegenerateZeroTarget) {
  DesignProblem p = BoxProblem(1, 0.5, -0.5, 0.5);
  p.target.r_designed = 0.0;
  const auto res = SolveMinTime(p, 1, 20);
  ASSERT_TRUE(res.ok());
  EXPECT_EQ(res->n_star, 1);
}

TEST(SolveMinTimeTest, AlternatingBound) {
  // Symmetric limits and no lag: alternating +-a_max needs at most
  // ceil(R / a_max^2) samples.
  DesignProblem p = BoxProblem(1, 0.0, -0.5, 0.5);
  p.grid.ts = 0.5;
  p.bounds.v_min = 0.8;
  p.bounds.v_max = 1.2;
  p.v0 = 1.0;
  p.target.r_designed = 3.1;
  const auto res = SolveMinTime(p, 1, 40);
  ASSERT_TRUE(res.ok());
  EXPECT_GE(res->n_star, 1);
  EXPECT_LE(res->n_star, static_cast<int>(std::ceil(3.1 / 0.25)));
  EXPECT_GE(res->report.objective_value, 3.1 - 1e-9);
  // One step shorter cannot reach the target.
  p.grid.n = res->n_star - 1;
  if (p.grid.n >= 1) {
    const auto shorter = MaxExcitation(p);
    ASSERT_TRUE(shorter.ok());
    EXPECT_LT(shorter->upper_bound, 3.1);
  }
}

TEST(SolveMinTimeTest, InfeasibleRange) {
  DesignProblem p = BoxProblem(1, 0.0, -0.5, 0.5);
  p.target.r_designed = 100.0;
  const auto res = SolveMinTime(p, 1, 10);
  ASSERT_TRUE(res.ok());
  EXPECT_EQ(res->n_star, 0);
  EXPECT_EQ(res->report.status, SolveStatus::kInfeasible);
}

}  // namespace
}  // namespace vmass
