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

#include <cmath>
#include <limits>
#include <vector>

namespace vmass {
namespace {

constexpr int kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  // Rows 0..m-1 are constraints, row m is the objective (reduced costs),
  // the last column is the right-hand side.
  Tableau(Eigen::MatrixXd t, std::vector<int> basis, const LpSettings& s)
      : t_(std::move(t)), basis_(std::move(basis)), s_(s) {}

  // Runs the simplex on columns [0, active_cols). Returns false on the
  // iteration limit.
  bool Optimize(int active_cols, int* iterations) {
    const int m = static_cast<int>(basis_.size());
    const int rhs = static_cast<int>(t_.cols()) - 1;
    int degenerate_run = 0;
    while (true) {
      if (*iterations >= s_.max_iterations) return false;
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      int enter = -1;
      double best = -s_.feasibility_tol;
      for (int j = 0; j < active_cols; ++j) {
        const double rc = t_(m, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double coef = t_(i, enter);
        if (coef <= s_.pivot_tol) continue;
        const double r = t_(i, rhs) / coef;
        if (r < ratio - 1e-12 ||
            (r <= ratio + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = r;
          leave = i;
        }
      }
      // Every column is bounded through explicit rows, so an unbounded ray
      // only shows up numerically; treat it as converged.
      if (leave < 0) return true;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      Pivot(leave, enter);
      ++*iterations;
    }
  }

  void Pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    const Eigen::RowVectorXd pivot_row = t_.row(row);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * pivot_row;
    }
    basis_[row] = col;
  }

  Eigen::MatrixXd& t() { return t_; }
  std::vector<int>& basis() { return basis_; }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  const LpSettings& s_;
};

}  // namespace

const char* ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
    case LpStatus::kInvalid:
      return "invalid";
  }
  return "unknown";
}

LpResult SolveLp(const LinearProgram& lp, const LpSettings& settings) {
  LpResult result;
  const int n = static_cast<int>(lp.cost.size());
  if (lp.a.cols() != n || lp.a.rows() != lp.b.size() ||
      lp.lower.size() != n || lp.upper.size() != n ||
      !lp.lower.allFinite() || !lp.upper.allFinite() ||
      ((lp.upper - lp.lower).array() < 0.0).any()) {
    return result;
  }

  // Shift to y = x - lower in [0, width]; bound rows y_j <= width_j.
  const int m_rows = static_cast<int>(lp.a.rows());
  const int m = m_rows + n;
  const Eigen::VectorXd width = lp.upper - lp.lower;
  Eigen::MatrixXd rows(m, n);
  Eigen::VectorXd rhs(m);
  rows.topRows(m_rows) = lp.a;
  rhs.head(m_rows) = lp.b - lp.a * lp.lower;
  rows.bottomRows(n).setIdentity();
  rhs.tail(n) = width;

  // Columns: y (n), slacks (m), artificials (one per negative rhs row), rhs.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i) {
    if (rhs(i) < 0.0) art_rows.push_back(i);
  }
  const int n_art = static_cast<int>(art_rows.size());
  const int n_struct = n + m;
  const int cols = n_struct + n_art + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    t.row(i).head(n) = rows.row(i);
    t(i, n + i) = 1.0;
    t(i, cols - 1) = rhs(i);
    basis[i] = n + i;
  }
  for (int r = 0; r < n_art; ++r) {
    const int i = art_rows[r];
    t.row(i) *= -1.0;
    t(i, n_struct + r) = 1.0;
    basis[i] = n_struct + r;
  }

  Tableau tab(std::move(t), std::move(basis), settings);
  int iterations = 0;
  if (n_art > 0) {
    // Phase one: minimize the sum of artificials.
    Eigen::MatrixXd& tt = tab.t();
    tt.row(m).setZero();
    for (int r = 0; r < n_art; ++r) tt.row(m) -= tt.row(art_rows[r]);
    for (int r = 0; r < n_art; ++r) tt(m, n_struct + r) = 0.0;
    if (!tab.Optimize(n_struct + n_art, &iterations)) {
      result.status = LpStatus::kIterationLimit;
      result.iterations = iterations;
      return result;
    }
    const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
    if (-tt(m, cols - 1) > settings.feasibility_tol * scale) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] < n_struct) continue;
      int col = -1;
      double best = settings.pivot_tol;
      for (int j = 0; j < n_struct; ++j) {
        if (std::abs(tt(i, j)) > best) {
          best = std::abs(tt(i, j));
          col = j;
        }
      }
      if (col >= 0) tab.Pivot(i, col);
    }
  }

  // Phase two objective row: c_j - c_B B^-1 a_j.
  Eigen::MatrixXd& tt = tab.t();
  tt.row(m).setZero();
  tt.row(m).head(n) = lp.cost.transpose();
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis()[i];
    if (bj < n && lp.cost(bj) != 0.0) tt.row(m) -= lp.cost(bj) * tt.row(i);
  }
  // Artificials stuck in the basis sit on redundant rows; excluding their
  // columns keeps them at zero.
  if (!tab.Optimize(n_struct, &iterations)) {
    result.status = LpStatus::kIterationLimit;
    result.iterations = iterations;
    return result;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis()[i];
    if (bj < n) y(bj) = tt(i, cols - 1);
  }
  result.x = (lp.lower + y).cwiseMax(lp.lower).cwiseMin(lp.upper);
  result.objective = lp.cost.dot(result.x);
  result.status = LpStatus::kOptimal;
  result.iterations = iterations;
  return result;
}

}  // namespace vmass
