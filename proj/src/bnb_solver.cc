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

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "absl/strings/str_cat.h"
#include "vmass/lp_solver.h"

namespace vmass {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kAscentIterations = 8;
constexpr int kInnerIterations = 8;
// Split at the relaxation point unless it lies this close (relative to the
// box width) to an edge; then split at the midpoint.
constexpr double kEdgeFraction = 0.1;

// Linear constraints on the acceleration sequence a = F u.
struct Polytope {
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

Polytope BuildPolytope(const DesignProblem& problem, const SampleBounds& sb) {
  const int n = problem.grid.n;
  const double ts = problem.grid.ts;
  const double p = problem.actuator.pole;
  const double v0 = problem.v0;
  const bool has_d = problem.bounds.d_max.has_value();
  Polytope poly;
  poly.lo = sb.a_min;
  poly.hi = sb.a_max;
  poly.rows = Eigen::MatrixXd::Zero(4 * n + (has_d ? 1 : 0), n);
  poly.rhs.resize(poly.rows.rows());
  const double u_hi = problem.bounds.UMax();
  const double u_lo = problem.bounds.UMin();
  for (int k = 0; k < n; ++k) {
    poly.rows.row(k).head(k + 1).setConstant(ts);
    poly.rhs(k) = sb.v_max(k) - v0;
    poly.rows.row(n + k).head(k + 1).setConstant(-ts);
    poly.rhs(n + k) = v0 - sb.v_min(k);
    // u_k = (a_k - p a_{k-1}) / (1 - p).
    poly.rows(2 * n + k, k) = 1.0 / (1.0 - p);
    if (k > 0) poly.rows(2 * n + k, k - 1) = -p / (1.0 - p);
    poly.rhs(2 * n + k) = u_hi;
    poly.rows.row(3 * n + k) = -poly.rows.row(2 * n + k);
    poly.rhs(3 * n + k) = -u_lo;
  }
  if (has_d) {
    poly.rows.row(4 * n) =
        ts * ts * TerminalDistanceWeights(problem.grid).transpose();
    poly.rhs(4 * n) = *problem.bounds.d_max - v0 * n * ts;
  }
  return poly;
}

LpResult SolveOver(const Polytope& poly, const Eigen::VectorXd& lo,
                   const Eigen::VectorXd& hi, const Eigen::VectorXd& cost,
                   const Eigen::RowVectorXd* extra_row = nullptr,
                   double extra_rhs = 0.0) {
  LinearProgram lp;
  lp.cost = cost;
  lp.lower = lo;
  lp.upper = hi;
  if (extra_row == nullptr) {
    lp.a = poly.rows;
    lp.b = poly.rhs;
  } else {
    lp.a.resize(poly.rows.rows() + 1, poly.rows.cols());
    lp.a << poly.rows, *extra_row;
    lp.b.resize(poly.rhs.size() + 1);
    lp.b << poly.rhs, extra_rhs;
  }
  return SolveLp(lp);
}

// Optimization-based bound tightening of the box. Returns false when the
// polytope is empty.
bool TightenBox(const Polytope& poly, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const Eigen::Index n = lo.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(k) = 1.0;
    const LpResult low = SolveOver(poly, lo, hi, c);
    if (low.status == LpStatus::kInfeasible) return false;
    if (low.status == LpStatus::kOptimal) lo(k) = std::max(lo(k), low.x(k));
    c(k) = -1.0;
    const LpResult high = SolveOver(poly, lo, hi, c);
    if (high.status == LpStatus::kInfeasible) return false;
    if (high.status == LpStatus::kOptimal) hi(k) = std::min(hi(k), high.x(k));
    if (hi(k) < lo(k)) hi(k) = lo(k);
  }
  return true;
}

// Secant overestimator of |a|^2 on the box: sum (lo+hi) a - lo hi.
Eigen::VectorXd SecantSlope(const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  return lo + hi;
}
double SecantConstant(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return -(lo.array() * hi.array()).sum();
}

// Removes parts of the box where |a|^2 >= r cannot hold. Returns false when
// the whole box is excluded.
bool TightenForExcitation(Eigen::VectorXd& lo, Eigen::VectorXd& hi, double r) {
  if (r <= 0.0) return true;
  const Eigen::Index n = lo.size();
  auto peak = [&](Eigen::Index k) {
    return std::max(lo(k) * lo(k), hi(k) * hi(k));
  };
  for (int pass = 0; pass < 2; ++pass) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) total += peak(k);
    if (total < r * (1.0 - 1e-12)) return false;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double need = r - (total - peak(k));
      if (need <= 0.0) continue;
      const double s = std::sqrt(need) * (1.0 - 1e-12);
      const double before = peak(k);
      if (hi(k) < s && lo(k) > -s) return false;
      if (lo(k) > -s) {
        lo(k) = std::max(lo(k), s);
      } else if (hi(k) < s) {
        hi(k) = std::min(hi(k), -s);
      }
      total += peak(k) - before;
    }
  }
  return true;
}

int BranchIndex(const Eigen::VectorXd& a, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi) {
  int best = -1;
  double best_gap = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double g = (a(k) - lo(k)) * (hi(k) - a(k));
    if (g > best_gap) {
      best_gap = g;
      best = static_cast<int>(k);
    }
  }
  if (best >= 0) return best;
  // Relaxation is exact at a; fall back to the widest coordinate.
  double widest = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (hi(k) - lo(k) > widest) {
      widest = hi(k) - lo(k);
      best = static_cast<int>(k);
    }
  }
  return best;
}

double SplitPoint(double a, double lo, double hi) {
  const double w = hi - lo;
  if (a - lo < kEdgeFraction * w || hi - a < kEdgeFraction * w) {
    return 0.5 * (lo + hi);
  }
  return a;
}

struct Node {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double bound = 0.0;
  long id = 0;
};

// Best-first order; `maximize` selects the largest bound. Ties go to the
// oldest node.
struct NodeOrder {
  bool maximize = true;
  bool operator()(const Node& x, const Node& y) const {
    if (x.bound != y.bound) {
      return maximize ? x.bound < y.bound : x.bound > y.bound;
    }
    return x.id > y.id;
  }
};

double Gap(double upper, double lower) {
  return (upper - lower) / std::max(1.0, std::abs(upper));
}

bool WithinTol(double bound, double incumbent, double tol) {
  return std::isfinite(bound) &&
         std::abs(bound - incumbent) <= tol * std::max(1.0, std::abs(bound));
}

// Local ascent of |a|^2 by successive linearization; each step solves
// max 2 a_ref^T a over the polytope.
Eigen::VectorXd Ascend(const Polytope& poly, Eigen::VectorXd a) {
  double value = a.squaredNorm();
  for (int it = 0; it < kAscentIterations; ++it) {
    const LpResult r = SolveOver(poly, poly.lo, poly.hi, -2.0 * a);
    if (r.status != LpStatus::kOptimal) break;
    const double next = r.x.squaredNorm();
    if (next <= value + 1e-12 * std::max(1.0, value)) break;
    a = r.x;
    value = next;
  }
  return a;
}

bool MeetsExcitation(const Eigen::VectorXd& a, double r) {
  return a.squaredNorm() >= r - 1e-10 * std::max(1.0, r);
}

// Feasible points by successive inner approximation: |a|^2 >= r holds on the
// half-space 2 a_ref^T a >= r + |a_ref|^2.
std::optional<Eigen::VectorXd> InnerApproximation(
    const Polytope& poly, const Eigen::VectorXd& cost, double r,
    Eigen::VectorXd a_ref) {
  std::optional<Eigen::VectorXd> best;
  double best_cost = kInf;
  for (int it = 0; it < kInnerIterations; ++it) {
    if (a_ref.squaredNorm() == 0.0) break;
    const Eigen::RowVectorXd row = -2.0 * a_ref.transpose();
    const LpResult res = SolveOver(poly, poly.lo, poly.hi, cost, &row,
                                   -(r + a_ref.squaredNorm()));
    if (res.status != LpStatus::kOptimal || !MeetsExcitation(res.x, r)) break;
    const double c = cost.dot(res.x);
    if (c >= best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
      if (!best.has_value()) best = res.x;
      break;
    }
    best = res.x;
    best_cost = c;
    a_ref = res.x;
  }
  return best;
}

struct BnbOutcome {
  std::optional<Eigen::VectorXd> a_star;
  double incumbent = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  long nodes = 0;
  bool exhausted = false;  // node budget hit
  bool stopped = false;    // early-exit threshold hit
  bool empty = false;      // polytope empty at the root
};

BnbOutcome MaximizeExcitation(const Polytope& poly, const BnbSettings& s) {
  BnbOutcome out;
  out.incumbent = -kInf;
  Eigen::VectorXd lo = poly.lo, hi = poly.hi;
  if (s.root_bound_tightening && !TightenBox(poly, lo, hi)) {
    out.empty = true;
    return out;
  }
  Polytope tight = poly;
  tight.lo = lo;
  tight.hi = hi;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open(
      NodeOrder{true});
  long next_id = 0;
  open.push({lo, hi, kInf, next_id++});
  double pruned_upper = -kInf;
  auto global_upper = [&]() {
    double u = std::max(out.incumbent, pruned_upper);
    if (!open.empty()) u = std::max(u, open.top().bound);
    return u;
  };

  while (!open.empty()) {
    if (out.nodes >= s.node_budget) {
      out.exhausted = true;
      break;
    }
    if (s.stop_above && out.incumbent >= *s.stop_above) {
      out.stopped = true;
      break;
    }
    if (s.stop_below && global_upper() < *s.stop_below) {
      out.stopped = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (out.a_star && node.bound <= out.incumbent) continue;
    if (out.a_star && WithinTol(node.bound, out.incumbent, s.tol)) {
      pruned_upper = std::max(pruned_upper, node.bound);
      continue;
    }
    ++out.nodes;
    const LpResult r = SolveOver(tight, node.lo, node.hi,
                                 -SecantSlope(node.lo, node.hi));
    if (r.status == LpStatus::kInfeasible) continue;
    if (r.status != LpStatus::kOptimal) {
      // Keep the parent bound; the node cannot be resolved further.
      pruned_upper = std::max(pruned_upper, node.bound);
      continue;
    }
    const double ub = std::min(
        node.bound, -r.objective + SecantConstant(node.lo, node.hi));
    const Eigen::VectorXd cand = Ascend(tight, r.x);
    for (const Eigen::VectorXd* a : {&r.x, &cand}) {
      const double val = a->squaredNorm();
      if (val > out.incumbent) {
        out.incumbent = val;
        out.a_star = *a;
      }
    }
    if (ub <= out.incumbent) continue;
    if (WithinTol(ub, out.incumbent, s.tol)) {
      pruned_upper = std::max(pruned_upper, ub);
      continue;
    }
    const int k = BranchIndex(r.x, node.lo, node.hi);
    if (k < 0) {
      pruned_upper = std::max(pruned_upper, ub);
      continue;
    }
    const double split = SplitPoint(r.x(k), node.lo(k), node.hi(k));
    Node left{node.lo, node.hi, ub, next_id++};
    left.hi(k) = split;
    Node right{node.lo, node.hi, ub, next_id++};
    right.lo(k) = split;
    open.push(std::move(left));
    open.push(std::move(right));
  }
  if (!out.a_star && open.empty() && !out.exhausted) {
    out.empty = true;
    return out;
  }
  out.lower = out.incumbent;
  out.upper = global_upper();
  return out;
}

BnbOutcome MinimizeLinear(const Polytope& poly, const Eigen::VectorXd& cost,
                          double r, std::optional<Eigen::VectorXd> seed,
                          const BnbSettings& s) {
  BnbOutcome out;
  out.incumbent = kInf;
  Eigen::VectorXd lo = poly.lo, hi = poly.hi;
  if (s.root_bound_tightening && !TightenBox(poly, lo, hi)) {
    out.empty = true;
    return out;
  }
  Polytope tight = poly;
  tight.lo = lo;
  tight.hi = hi;
  auto offer = [&](const Eigen::VectorXd& a) {
    const double c = cost.dot(a);
    if (c < out.incumbent) {
      out.incumbent = c;
      out.a_star = a;
    }
  };
  if (seed.has_value()) {
    offer(*seed);
    if (auto inner = InnerApproximation(tight, cost, r, *seed)) offer(*inner);
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open(
      NodeOrder{false});
  long next_id = 0;
  open.push({lo, hi, -kInf, next_id++});
  double pruned_lower = kInf;
  auto global_lower = [&]() {
    double l = std::min(out.incumbent, pruned_lower);
    if (!open.empty()) l = std::min(l, open.top().bound);
    return l;
  };

  while (!open.empty()) {
    if (out.nodes >= s.node_budget) {
      out.exhausted = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (out.a_star && node.bound >= out.incumbent) continue;
    if (out.a_star && WithinTol(node.bound, out.incumbent, s.tol)) {
      pruned_lower = std::min(pruned_lower, node.bound);
      continue;
    }
    if (!TightenForExcitation(node.lo, node.hi, r)) continue;
    ++out.nodes;
    const Eigen::RowVectorXd secant = -SecantSlope(node.lo, node.hi).transpose();
    const double secant_rhs = -(r - SecantConstant(node.lo, node.hi));
    const LpResult res =
        SolveOver(tight, node.lo, node.hi, cost, &secant, secant_rhs);
    if (res.status == LpStatus::kInfeasible) continue;
    if (res.status != LpStatus::kOptimal) {
      pruned_lower = std::min(pruned_lower, node.bound);
      continue;
    }
    const double lb = std::max(node.bound, res.objective);
    if (MeetsExcitation(res.x, r)) {
      // The relaxation optimum is feasible, so the node is solved.
      offer(res.x);
      pruned_lower = std::min(pruned_lower, std::max(lb, out.incumbent));
      continue;
    }
    if (auto inner = InnerApproximation(tight, cost, r, res.x)) offer(*inner);
    if (lb >= out.incumbent) continue;
    if (out.a_star && WithinTol(lb, out.incumbent, s.tol)) {
      pruned_lower = std::min(pruned_lower, lb);
      continue;
    }
    const int k = BranchIndex(res.x, node.lo, node.hi);
    if (k < 0) {
      pruned_lower = std::min(pruned_lower, lb);
      continue;
    }
    const double split = SplitPoint(res.x(k), node.lo(k), node.hi(k));
    Node left{node.lo, node.hi, lb, next_id++};
    left.hi(k) = split;
    Node right{node.lo, node.hi, lb, next_id++};
    right.lo(k) = split;
    open.push(std::move(left));
    open.push(std::move(right));
  }
  if (!out.a_star && open.empty() && !out.exhausted) {
    out.empty = true;
    return out;
  }
  out.upper = out.incumbent;
  out.lower = global_lower();
  return out;
}

absl::Status CheckSize(const DesignProblem& problem, const BnbSettings& s) {
  if (absl::Status st = problem.Validate(); !st.ok()) return st;
  if (problem.grid.n > s.max_n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "horizon n=", problem.grid.n, " exceeds the certified-solver cap of ",
        s.max_n, "; use the parameterized search"));
  }
  if (!(s.tol >= 0.0) || s.node_budget < 1) {
    return absl::InvalidArgumentError("invalid solver tolerance or budget");
  }
  return absl::OkStatus();
}

void Verify(const DesignProblem& problem, const BnbSettings& s,
            SolveReport& rep) {
  if (rep.u_star.size() != problem.grid.n) return;
  absl::StatusOr<FeasibilityReport> check =
      CheckFeasibility(rep.u_star, problem, s.verify_tol);
  rep.verified = check.ok() && check->feasible;
}

absl::StatusOr<SolveReport> MaxExcitationWithBounds(
    const DesignProblem& problem, const SampleBounds& sb,
    const BnbSettings& s) {
  const Polytope poly = BuildPolytope(problem, sb);
  const BnbOutcome o = MaximizeExcitation(poly, s);
  SolveReport rep;
  rep.nodes_explored = o.nodes;
  if (o.empty) {
    rep.status = SolveStatus::kInfeasible;
    rep.objective_value = kNaN;
    rep.lower_bound = rep.upper_bound = rep.gap = kNaN;
    rep.message = "linear constraints admit no trajectory";
    return rep;
  }
  rep.u_star = InvertActuator(*o.a_star, problem.actuator);
  rep.objective_value = o.incumbent;
  rep.lower_bound = o.lower;
  rep.upper_bound = o.upper;
  rep.gap = Gap(o.upper, o.lower);
  rep.excitation_bound = o.upper;
  if (o.exhausted) {
    rep.status = SolveStatus::kBudgetExhausted;
    rep.message = "node budget exhausted";
  } else if (o.stopped) {
    rep.status = rep.gap <= s.tol ? SolveStatus::kOptimal
                                  : SolveStatus::kGapReached;
    rep.message = "stopped at excitation threshold";
  } else {
    rep.status = SolveStatus::kOptimal;
  }
  return rep;
}

absl::StatusOr<SolveReport> LinearCostWithBounds(const DesignProblem& problem,
                                                 const SampleBounds& sb,
                                                 const Eigen::VectorXd& cost,
                                                 double offset,
                                                 const BnbSettings& s) {
  const double r = problem.target.r_designed;
  // Decide reachability of r first; its incumbent seeds the search.
  BnbSettings probe = s;
  probe.stop_above = r;
  probe.stop_below = r;
  absl::StatusOr<SolveReport> reach = MaxExcitationWithBounds(problem, sb, probe);
  if (!reach.ok()) return reach.status();
  SolveReport rep;
  rep.nodes_explored = reach->nodes_explored;
  rep.excitation_bound = reach->upper_bound;
  if (reach->status == SolveStatus::kInfeasible ||
      reach->upper_bound < r) {
    rep.status = SolveStatus::kInfeasible;
    rep.objective_value = rep.lower_bound = rep.upper_bound = rep.gap = kNaN;
    rep.message =
        reach->status == SolveStatus::kInfeasible
            ? "linear constraints admit no trajectory"
            : absl::StrCat("maximum achievable excitation ",
                           reach->upper_bound, " < r_designed ", r);
    return rep;
  }

  // Cost in acceleration coordinates: c_u^T u = (F^-T c_u)^T a.
  const Eigen::MatrixXd f = BuildActuatorToeplitz(problem.actuator, problem.grid);
  const Eigen::VectorXd cost_a =
      f.transpose().triangularView<Eigen::Upper>().solve(cost);
  const Polytope poly = BuildPolytope(problem, sb);
  std::optional<Eigen::VectorXd> seed;
  if (reach->objective_value >= r) {
    seed = f * reach->u_star;
  }
  const BnbOutcome o = MinimizeLinear(poly, cost_a, r, seed, s);
  rep.nodes_explored += o.nodes;
  if (o.empty || !o.a_star) {
    rep.status = o.exhausted ? SolveStatus::kBudgetExhausted
                             : SolveStatus::kInfeasible;
    rep.objective_value = rep.lower_bound = rep.upper_bound = rep.gap = kNaN;
    rep.message = o.exhausted ? "node budget exhausted without incumbent"
                              : "no trajectory meets the excitation target";
    return rep;
  }
  rep.u_star = InvertActuator(*o.a_star, problem.actuator);
  rep.objective_value = cost.dot(rep.u_star) + offset;
  rep.lower_bound = o.lower + offset;
  rep.upper_bound = o.upper + offset;
  rep.gap = Gap(rep.upper_bound, rep.lower_bound);
  rep.status = o.exhausted ? SolveStatus::kBudgetExhausted
                           : SolveStatus::kOptimal;
  if (o.exhausted) rep.message = "node budget exhausted";
  return rep;
}

// Solves with bounds resolved at the distance profile of the previous
// iterate until the resolved bounds stop changing.
template <typename SolveFn>
absl::StatusOr<SolveReport> FixedPoint(const DesignProblem& problem,
                                       SolveFn&& solve) {
  const int n = problem.grid.n;
  if (problem.bounds.IsConstant()) {
    return solve(ResolveSampleBounds(problem.bounds, n, {}));
  }
  constexpr int kMaxIterations = 10;
  Eigen::VectorXd distance(n);
  for (int k = 0; k < n; ++k) distance(k) = problem.v0 * (k + 1) * problem.grid.ts;
  SampleBounds sb = ResolveSampleBounds(problem.bounds, n, distance);
  absl::StatusOr<SolveReport> rep;
  for (int it = 0; it < kMaxIterations; ++it) {
    rep = solve(sb);
    if (!rep.ok() || rep->u_star.size() != n) return rep;
    absl::StatusOr<Profile> prof = SimulateProfile(
        rep->u_star, problem.actuator, problem.grid, problem.v0);
    if (!prof.ok()) return prof.status();
    const SampleBounds next = ResolveSampleBounds(problem.bounds, n, prof->d);
    if (next.a_min == sb.a_min && next.a_max == sb.a_max &&
        next.v_min == sb.v_min && next.v_max == sb.v_max) {
      rep->message = absl::StrCat(rep->message, rep->message.empty() ? "" : "; ",
                                  "varying bounds converged after ", it + 1,
                                  " iterations");
      return rep;
    }
    sb = next;
  }
  rep->message = absl::StrCat(rep->message, rep->message.empty() ? "" : "; ",
                              "varying bounds did not converge in ",
                              kMaxIterations, " iterations");
  return rep;
}

}  // namespace

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kGapReached:
      return "gap_reached";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kBudgetExhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

absl::StatusOr<SolveReport> MaxExcitation(const DesignProblem& problem,
                                          const BnbSettings& settings) {
  if (absl::Status s = CheckSize(problem, settings); !s.ok()) return s;
  if (!problem.bounds.IsConstant()) {
    return absl::InvalidArgumentError(
        "maximum excitation requires constant bounds");
  }
  absl::StatusOr<SolveReport> rep = MaxExcitationWithBounds(
      problem, ResolveSampleBounds(problem.bounds, problem.grid.n, {}),
      settings);
  if (rep.ok()) Verify(problem, settings, *rep);
  return rep;
}

absl::StatusOr<SolveReport> SolveLinearCost(const DesignProblem& problem,
                                            const Eigen::VectorXd& cost,
                                            double offset,
                                            const BnbSettings& settings) {
  if (absl::Status s = CheckSize(problem, settings); !s.ok()) return s;
  if (cost.size() != problem.grid.n) {
    return absl::InvalidArgumentError("cost length does not match horizon");
  }
  absl::StatusOr<SolveReport> rep =
      FixedPoint(problem, [&](const SampleBounds& sb) {
        return LinearCostWithBounds(problem, sb, cost, offset, settings);
      });
  if (rep.ok()) Verify(problem, settings, *rep);
  return rep;
}

absl::StatusOr<SolveReport> SolveFixedHorizon(const DesignProblem& problem,
                                              const BnbSettings& settings) {
  if (absl::Status s = CheckSize(problem, settings); !s.ok()) return s;
  if (problem.objective == Objective::kMinDistance) {
    absl::StatusOr<ConstraintSystem> sys = AssembleConstraints(problem);
    if (!sys.ok()) return sys.status();
    return SolveLinearCost(problem, sys->distance_cost, sys->distance_offset,
                           settings);
  }
  absl::StatusOr<SolveReport> rep =
      FixedPoint(problem, [&](const SampleBounds& sb) {
        return MaxExcitationWithBounds(problem, sb, settings);
      });
  if (!rep.ok()) return rep;
  if (problem.objective == Objective::kMinTime &&
      rep->status != SolveStatus::kInfeasible &&
      rep->upper_bound < problem.target.r_designed) {
    rep->status = SolveStatus::kInfeasible;
    rep->message = absl::StrCat("maximum achievable excitation ",
                                rep->upper_bound, " < r_designed ",
                                problem.target.r_designed);
  }
  Verify(problem, settings, *rep);
  return rep;
}

absl::StatusOr<MinTimeResult> SolveMinTime(const DesignProblem& problem,
                                           int n_lo, int n_hi,
                                           const BnbSettings& settings) {
  if (n_lo < 1 || n_hi < n_lo) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid horizon range [", n_lo, ", ", n_hi, "]"));
  }
  if (!problem.bounds.IsConstant()) {
    return absl::InvalidArgumentError("minimum time requires constant bounds");
  }
  const double r = problem.target.r_designed;
  MinTimeResult result;
  // Reachability of r on horizon n; 1 = reachable, 0 = not, -1 = unknown.
  auto reachable = [&](int n) -> absl::StatusOr<int> {
    DesignProblem at = problem;
    at.grid.n = n;
    BnbSettings probe = settings;
    probe.stop_above = r;
    probe.stop_below = r;
    absl::StatusOr<SolveReport> rep = MaxExcitation(at, probe);
    if (!rep.ok()) return rep.status();
    ++result.horizons_checked;
    if (rep->status == SolveStatus::kInfeasible) return 0;
    if (rep->objective_value >= r) return 1;
    if (rep->upper_bound < r) return 0;
    return -1;
  };

  absl::StatusOr<int> top = reachable(n_hi);
  if (!top.ok()) return top.status();
  if (*top != 1) {
    DesignProblem at = problem;
    at.grid.n = n_hi;
    absl::StatusOr<SolveReport> rep = MaxExcitation(at, settings);
    if (!rep.ok()) return rep.status();
    result.n_star = 0;
    result.report = *rep;
    result.report.status = *top == 0 ? SolveStatus::kInfeasible
                                     : SolveStatus::kBudgetExhausted;
    result.report.message = absl::StrCat(
        "r_designed ", r, " not reachable within n <= ", n_hi,
        " (excitation bound ", rep->upper_bound, ")");
    return result;
  }
  int lo = n_lo, hi = n_hi;  // hi is reachable
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    absl::StatusOr<int> ok = reachable(mid);
    if (!ok.ok()) return ok.status();
    if (*ok == 1) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  result.n_star = hi;
  DesignProblem at = problem;
  at.grid.n = hi;
  absl::StatusOr<SolveReport> rep = MaxExcitation(at, settings);
  if (!rep.ok()) return rep.status();
  result.report = *std::move(rep);
  return result;
}

}  // namespace vmass
