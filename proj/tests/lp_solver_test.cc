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

#include "vmass/lp_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace vmass {
namespace {

// Optimum by enumerating every basic solution of the stacked system
// [a; I; -I] x <= [b; upper; -lower].
double VertexEnumerationOptimum(const LinearProgram& lp, bool* feasible) {
  const int n = lp.cost.size();
  const int m = lp.a.rows();
  Eigen::MatrixXd g(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  g << lp.a, Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  h << lp.b, lp.upper, -lp.lower;
  const int rows = g.rows();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  // Iterate over n-subsets.
  std::vector<bool> mask(rows, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    int c = 0;
    for (int i = 0; i < rows; ++i)
      if (mask[i]) pick[c++] = i;
    Eigen::MatrixXd sub(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      sub.row(i) = g.row(pick[i]);
      rhs(i) = h(pick[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (((g * x - h).array() > 1e-9).any()) continue;
    best = std::min(best, lp.cost.dot(x));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  *feasible = std::isfinite(best);
  return best;
}

TEST(LpSolverTest, SimpleBox) {
  LinearProgram lp;
  lp.cost = Eigen::Vector2d(-1, -2);
  lp.a = Eigen::MatrixXd(1, 2);
  lp.a << 1, 1;
  lp.b = Eigen::VectorXd::Constant(1, 1.5);
  lp.lower = Eigen::Vector2d(0, 0);
  lp.upper = Eigen::Vector2d(1, 1);
  const LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -2.5, 1e-12);
  EXPECT_NEAR(r.x(0), 0.5, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}

TEST(LpSolverTest, NegativeLowerBoundsAndInfeasibility) {
  LinearProgram lp;
  lp.cost = Eigen::Vector2d(1, 1);
  lp.a = Eigen::MatrixXd(1, 2);
  lp.a << -1, -1;
  lp.b = Eigen::VectorXd::Constant(1, 1.0);  // x0 + x1 >= -1
  lp.lower = Eigen::Vector2d(-2, -2);
  lp.upper = Eigen::Vector2d(2, 2);
  LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);

  lp.b(0) = -5.0;  // x0 + x1 >= 5 is impossible in the box
  r = SolveLp(lp);
  EXPECT_EQ(r.status, LpStatus::kInfeasible);
}

TEST(LpSolverTest, RejectsMalformed) {
  LinearProgram lp;
  lp.cost = Eigen::Vector2d(1, 1);
  lp.a = Eigen::MatrixXd(0, 2);
  lp.b = Eigen::VectorXd(0);
  lp.lower = Eigen::Vector2d(1, 0);
  lp.upper = Eigen::Vector2d(0, 1);
  EXPECT_EQ(SolveLp(lp).status, LpStatus::kInvalid);
}

TEST(LpSolverTest, MatchesVertexEnumeration) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int feasible_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 5;
    LinearProgram lp;
    lp.cost.resize(n);
    for (auto& c : lp.cost) c = normal(rng);
    lp.a.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) lp.a(i, j) = normal(rng);
    lp.b.resize(m);
    for (auto& b : lp.b) b = unif(rng);
    lp.lower = Eigen::VectorXd::Constant(n, -1.0);
    lp.upper = Eigen::VectorXd::Constant(n, 1.5);
    bool feasible = false;
    const double expected = VertexEnumerationOptimum(lp, &feasible);
    const LpResult r = SolveLp(lp);
    if (!feasible) {
      EXPECT_EQ(r.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++feasible_count;
    ASSERT_EQ(r.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, expected, 1e-9) << "trial " << trial;
    EXPECT_LE((lp.a * r.x - lp.b).maxCoeff(), 1e-9);
  }
  EXPECT_GT(feasible_count, 100);
}

TEST(LpSolverTest, DegenerateVertex) {
  // Many constraints through the same optimal vertex.
  LinearProgram lp;
  lp.cost = Eigen::Vector2d(-1, -1);
  lp.a = Eigen::MatrixXd(4, 2);
  lp.a << 1, 0, 0, 1, 1, 1, 2, 1;
  lp.b = Eigen::Vector4d(1, 1, 2, 3);
  lp.lower = Eigen::Vector2d(0, 0);
  lp.upper = Eigen::Vector2d(1, 1);
  const LpResult r = SolveLp(lp);
  ASSERT_EQ(r.status, LpStatus::kOptimal);
  EXPECT_NEAR(r.objective, -2.0, 1e-12);
}

}  // namespace
}  // namespace vmass
