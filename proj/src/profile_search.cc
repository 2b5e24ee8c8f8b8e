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

#include "vmass/profile_search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "vmass/lp_solver.h"

namespace vmass {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool Maximizes(Objective objective) {
  return objective != Objective::kMinDistance;
}

double ObjectiveOf(const ProfileScore& s, Objective objective) {
  return Maximizes(objective) ? s.excitation : s.distance;
}

// Lexicographic: violation first, then the objective.
bool Better(const ProfileScore& x, const ProfileScore& y, Objective objective,
            double tol) {
  const bool fx = x.violation <= tol, fy = y.violation <= tol;
  if (fx != fy) return fx;
  if (!fx) return x.violation < y.violation * (1.0 - 1e-12);
  const double ox = ObjectiveOf(x, objective), oy = ObjectiveOf(y, objective);
  const double margin = 1e-12 * std::max(1.0, std::abs(oy));
  return Maximizes(objective) ? ox > oy + margin : ox < oy - margin;
}

// Velocity extreme reached when the input is `first` for one sample and
// `then` afterwards, until the acceleration has the sign of `then` or the
// horizon ends. Returns the max for a downward `then`, the min otherwise.
double PredictExtreme(double a, double v, double pole, double ts,
                      double first, double then, int remaining) {
  const bool down = then < 0.0;
  double extreme = v;
  for (int j = 0; j < remaining; ++j) {
    const double level = j == 0 ? first : then;
    a = pole * a + (1.0 - pole) * level;
    v += ts * a;
    extreme = down ? std::max(extreme, v) : std::min(extreme, v);
    if (j > 0 && (down ? a <= 0.0 : a >= 0.0)) break;
  }
  return extreme;
}

class Searcher {
 public:
  Searcher(const DesignProblem& problem, const SearchSettings& settings)
      : problem_(problem),
        settings_(settings),
        n_(problem.grid.n),
        u_lo_(problem.bounds.UMin()),
        u_hi_(problem.bounds.UMax()) {}

  struct Candidate {
    ProfileParam param;
    ProfileScore score;
  };

  Candidate Make(ProfileParam param) const {
    Candidate c{std::move(param), {}};
    absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(c.param, n_);
    c.score = u.ok() ? ScoreInput(*u, problem_) : ProfileScore{kInf, 0, kInf};
    return c;
  }

  bool IsBetter(const Candidate& x, const Candidate& y) const {
    return Better(x.score, y.score, problem_.objective,
                  settings_.feasibility_tol);
  }

  bool TryReplace(Candidate& best, ProfileParam param) const {
    if (!param.Validate(n_).ok()) return false;
    Candidate c = Make(std::move(param));
    if (!IsBetter(c, best)) return false;
    best = std::move(c);
    return true;
  }

  Candidate Descend(Candidate best) const {
    const int k = static_cast<int>(best.param.switch_times.size());
    for (int step = std::max(1, n_ / 16); step >= 1; step /= 2) {
      for (int sweep = 0; sweep < settings_.max_sweeps; ++sweep) {
        bool improved = false;
        for (int i = 0; i < k; ++i) {
          for (int delta : {step, -step}) {
            ProfileParam single = best.param;
            single.switch_times[i] += delta;
            if (TryReplace(best, std::move(single))) {
              improved = true;
              continue;
            }
            ProfileParam tail = best.param;
            for (int j = i; j < k; ++j) tail.switch_times[j] += delta;
            if (TryReplace(best, std::move(tail))) improved = true;
          }
        }
        if (settings_.optimize_levels) {
          for (size_t i = 0; i < best.param.levels.size(); ++i) {
            for (double sign : {1.0, -1.0}) {
              ProfileParam p = best.param;
              p.levels[i] = std::clamp(
                  p.levels[i] + sign * settings_.level_step * (u_hi_ - u_lo_),
                  u_lo_, u_hi_);
              if (TryReplace(best, std::move(p))) improved = true;
            }
          }
        }
        if (!improved) break;
      }
    }
    return best;
  }

  ProfileParam Jitter(const ProfileParam& param, std::mt19937_64& rng) const {
    const int spread = std::max(1, n_ / 50);
    std::uniform_int_distribution<int> dist(-spread, spread);
    ProfileParam p = param;
    int prev = 1;
    for (int& s : p.switch_times) {
      s = std::max(s + dist(rng), prev + 1);
      prev = s;
    }
    // Push back inside the horizon from the end.
    int next = n_ + 1;
    for (auto it = p.switch_times.rbegin(); it != p.switch_times.rend(); ++it) {
      *it = std::min(*it, next - 1);
      next = *it;
    }
    return p;
  }

 private:
  const DesignProblem& problem_;
  const SearchSettings& settings_;
  const int n_;
  const double u_lo_;
  const double u_hi_;
};

SolveReport MakeReport(const Eigen::VectorXd& u, const ProfileScore& score,
                       Objective objective) {
  SolveReport report;
  report.u_star = u;
  report.objective_value = ObjectiveOf(score, objective);
  if (Maximizes(objective)) {
    report.lower_bound = report.objective_value;
    report.upper_bound = kInf;
  } else {
    report.lower_bound = -kInf;
    report.upper_bound = report.objective_value;
  }
  report.gap = std::numeric_limits<double>::quiet_NaN();
  report.status = SolveStatus::kGapReached;
  report.certified = false;
  report.message = "parameterized search: no global certificate";
  return report;
}

// Smallest n with n * max(a_min^2, a_max^2) >= r_designed.
int ExcitationLowerBound(const DesignProblem& problem) {
  const double peak = std::max(problem.bounds.a_max * problem.bounds.a_max,
                               problem.bounds.a_min * problem.bounds.a_min);
  return std::max(
      1, static_cast<int>(std::ceil(problem.target.r_designed / peak - 1e-12)));
}

DesignProblem WithHorizon(const DesignProblem& problem, int n) {
  DesignProblem p = problem;
  p.grid.n = n;
  return p;
}

// Verifies `param` by simulation and wraps it as an uncertified report.
absl::StatusOr<ParameterizedResult> Finalize(const DesignProblem& problem,
                                             const ProfileParam& param,
                                             const SearchSettings& settings) {
  const int n = problem.grid.n;
  absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(param, n);
  if (!u.ok()) return u.status();
  const ProfileScore score = ScoreInput(*u, problem);
  DesignProblem check = problem;
  if (problem.objective == Objective::kMaxAccuracy) {
    check.target.r_designed = 0.0;
  }
  absl::StatusOr<FeasibilityReport> feas =
      CheckFeasibility(*u, check, settings.feasibility_tol);
  if (!feas.ok()) return feas.status();
  if (!feas->feasible) {
    return absl::NotFoundError(absl::StrCat(
        "no feasible incumbent found on ", n, " samples (violation ",
        score.violation, ", excitation ", score.excitation, " of ",
        problem.target.r_designed, ")"));
  }
  ParameterizedResult result;
  result.report = MakeReport(*u, score, problem.objective);
  result.report.verified = true;
  result.param = param;
  return result;
}

// Block levels as a profile, merging equal neighbours.
ProfileParam FromBlocks(const Eigen::VectorXd& x, int block) {
  ProfileParam p;
  p.levels.push_back(x(0));
  for (Eigen::Index j = 1; j < x.size(); ++j) {
    if (x(j) == p.levels.back()) continue;
    p.switch_times.push_back(static_cast<int>(j) * block + 1);
    p.levels.push_back(x(j));
  }
  return p;
}

}  // namespace

absl::Status ProfileParam::Validate(int n) const {
  if (levels.size() != switch_times.size() + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need one more level than switch times, got ", levels.size(), " and ",
        switch_times.size()));
  }
  int prev = 1;
  for (int s : switch_times) {
    if (s <= prev || s > n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "switch times must be strictly increasing in [2, ", n, "], got ", s,
          " after ", prev));
    }
    prev = s;
  }
  return absl::OkStatus();
}

absl::StatusOr<Eigen::VectorXd> ExpandProfileParam(const ProfileParam& param,
                                                   int n) {
  if (absl::Status s = param.Validate(n); !s.ok()) return s;
  Eigen::VectorXd u(n);
  int start = 0;
  for (size_t i = 0; i < param.levels.size(); ++i) {
    const int end =
        i < param.switch_times.size() ? param.switch_times[i] - 1 : n;
    u.segment(start, end - start).setConstant(param.levels[i]);
    start = end;
  }
  return u;
}

ProfileParam BangBangTemplate(int n, int switches, double u_hi, double u_lo) {
  ProfileParam p;
  switches = std::clamp(switches, 0, std::max(0, n - 1));
  for (int i = 0; i < switches; ++i) {
    p.switch_times.push_back(2 + static_cast<int>(
                                     std::floor((i + 1.0) * (n - 1) /
                                                (switches + 1.0))));
  }
  // Evenly spaced times can collide on short horizons.
  for (size_t i = 1; i < p.switch_times.size(); ++i) {
    p.switch_times[i] = std::max(p.switch_times[i], p.switch_times[i - 1] + 1);
  }
  for (int i = 0; i <= switches; ++i) p.levels.push_back(i % 2 ? u_lo : u_hi);
  return p;
}

ProfileParam CycleTemplate(int n, int cycles, int up, int down, int ramp,
                           double u_hi, double u_lo, double gap_level) {
  ProfileParam p;
  const int ramp_start = ramp > 0 ? std::max(1, n - ramp + 1) : n + 1;
  int t = 1;
  auto segment = [&](double level, int end) {  // fills [t, end)
    if (end <= t) return;
    if (t > 1) p.switch_times.push_back(t);
    p.levels.push_back(level);
    t = end;
  };
  for (int c = 0; c < cycles; ++c) {
    segment(u_hi, std::min(t + up, ramp_start));
    segment(u_lo, std::min(t + down, ramp_start));
  }
  segment(gap_level, ramp_start);
  segment(u_hi, n + 1);
  if (p.levels.empty()) p.levels.push_back(u_hi);
  return p;
}

ProfileParam LagAwareBangBang(const DesignProblem& problem, int n, double v_low,
                              double v_high, int ramp_from) {
  const double pole = problem.actuator.pole;
  const double ts = problem.grid.ts;
  const double u_hi = problem.bounds.UMax();
  const double u_lo = problem.bounds.UMin();
  ProfileParam p;
  bool up = problem.v0 < v_high;
  p.levels.push_back(up ? u_hi : u_lo);
  double a = 0.0, v = problem.v0;
  for (int k = 1; k <= n; ++k) {
    if (ramp_from > 0 && k == ramp_from) {
      v_low = problem.bounds.v_min;
      v_high = problem.bounds.v_max;
      if (!up) {
        up = true;
        if (k == 1) {
          p.levels[0] = u_hi;
        } else {
          p.switch_times.push_back(k);
          p.levels.push_back(u_hi);
        }
      }
    }
    const int remaining = n - k + 1;
    const bool just_switched =
        !p.switch_times.empty() && p.switch_times.back() == k;
    if (k > 1 && !just_switched) {
      // Stay one more sample only if the switch can still follow it.
      const bool leave =
          up ? PredictExtreme(a, v, pole, ts, u_hi, u_lo, remaining) > v_high
             : PredictExtreme(a, v, pole, ts, u_lo, u_hi, remaining) < v_low;
      if (leave) {
        up = !up;
        p.switch_times.push_back(k);
        p.levels.push_back(up ? u_hi : u_lo);
      }
    }
    a = pole * a + (1.0 - pole) * (up ? u_hi : u_lo);
    v += ts * a;
  }
  return p;
}

ProfileScore ScoreInput(const Eigen::VectorXd& u,
                        const DesignProblem& problem) {
  const int n = static_cast<int>(u.size());
  const double pole = problem.actuator.pole;
  const double ts = problem.grid.ts;
  const Bounds& b = problem.bounds;
  Eigen::VectorXd a(n), v(n), d(n);
  double ak = 0.0, vk = problem.v0, dk = 0.0;
  for (int k = 0; k < n; ++k) {
    ak = pole * ak + (1.0 - pole) * u(k);
    dk += vk * ts + 0.5 * ak * ts * ts;
    vk += ts * ak;
    a(k) = ak;
    v(k) = vk;
    d(k) = dk;
  }
  ProfileScore s;
  s.excitation = a.squaredNorm();
  s.distance = n > 0 ? d(n - 1) : 0.0;
  auto over = [](double x) { return std::max(0.0, x); };
  if (b.IsConstant()) {
    for (int k = 0; k < n; ++k) {
      s.violation += over(v(k) - b.v_max) + over(b.v_min - v(k)) +
                     over(a(k) - b.a_max) + over(b.a_min - a(k));
    }
  } else {
    const SampleBounds sb = ResolveSampleBounds(b, n, d);
    for (int k = 0; k < n; ++k) {
      s.violation += over(v(k) - sb.v_max(k)) + over(sb.v_min(k) - v(k)) +
                     over(a(k) - sb.a_max(k)) + over(sb.a_min(k) - a(k));
    }
  }
  for (int k = 0; k < n; ++k) {
    s.violation += over(u(k) - b.UMax()) + over(b.UMin() - u(k));
  }
  if (b.d_max.has_value()) s.violation += over(s.distance - *b.d_max);
  if (problem.objective == Objective::kMinDistance &&
      problem.target.r_designed > 0.0) {
    s.violation += over(problem.target.r_designed - s.excitation) /
                   problem.target.r_designed;
  }
  return s;
}

absl::StatusOr<ParameterizedResult> SearchProfile(
    const DesignProblem& problem, const std::vector<ProfileParam>& seeds,
    const SearchSettings& settings) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (seeds.empty()) {
    return absl::InvalidArgumentError("at least one seed profile is needed");
  }
  const int n = problem.grid.n;
  Searcher searcher(problem, settings);

  std::vector<Searcher::Candidate> starts;
  for (const ProfileParam& seed : seeds) {
    if (absl::Status s = seed.Validate(n); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("seed profile: ", s.message()));
    }
    starts.push_back(searcher.Make(seed));
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [&](const auto& x, const auto& y) {
                     return searcher.IsBetter(x, y);
                   });
  // Descend from the best few seeds, then from jittered copies of the
  // winner.
  const size_t descents =
      std::min(starts.size(), static_cast<size_t>(settings.multistart + 1));
  Searcher::Candidate best = searcher.Descend(starts[0]);
  for (size_t i = 1; i < descents; ++i) {
    Searcher::Candidate c = searcher.Descend(starts[i]);
      if (searcher.IsBetter(c, best)) best = std::move(c);
  }
  std::mt19937_64 rng(settings.seed);
  for (int i = 0; i < settings.multistart; ++i) {
    Searcher::Candidate c =
        searcher.Descend(searcher.Make(searcher.Jitter(best.param, rng)));
    if (searcher.IsBetter(c, best)) best = std::move(c);
  }

  if (settings.slp_refine) {
    absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(best.param, n);
    if (!u.ok()) return u.status();
    if (best.score.violation <= settings.feasibility_tol) {
      absl::StatusOr<ParameterizedResult> refined =
          RefineBySlp(problem, *u, settings);
      if (refined.ok()) return refined;
    }
  }
  return Finalize(problem, best.param, settings);
}

absl::StatusOr<ParameterizedResult> RefineBySlp(const DesignProblem& problem,
                                                const Eigen::VectorXd& start,
                                                const SearchSettings& settings) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  const int n = problem.grid.n;
  if (start.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "start has ", start.size(), " samples, horizon is ", n));
  }
  const double ts = problem.grid.ts;
  const double pole = problem.actuator.pole;
  const Bounds& bounds = problem.bounds;
  const bool maximize = Maximizes(problem.objective);
  const int block = std::max(1, (n + settings.slp_blocks - 1) /
                                    std::max(1, settings.slp_blocks));
  const int nb = (n + block - 1) / block;
  const double tol = settings.feasibility_tol;
  const double margin = 0.1 * tol;

  // Acceleration response to a unit input on each block, then velocity.
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, nb);
  for (int j = 0; j < nb; ++j) {
    double a = 0.0;
    for (int k = j * block; k < n; ++k) {
      const double u = k < std::min(n, (j + 1) * block) ? 1.0 : 0.0;
      a = pole * a + (1.0 - pole) * u;
      resp(k, j) = a;
      if (u == 0.0 && std::abs(a) < 1e-300) break;
    }
  }
  Eigen::MatrixXd vel(n, nb);
  vel.row(0) = ts * resp.row(0);
  for (int k = 1; k < n; ++k) vel.row(k) = vel.row(k - 1) + ts * resp.row(k);
  Eigen::VectorXd dist_cost = Eigen::VectorXd::Zero(nb);
  for (int k = 0; k < n; ++k) {
    dist_cost += ts * ts * (n - 1 - k + 0.5) * resp.row(k).transpose();
  }
  const double dist_offset = problem.v0 * n * ts;

  auto expand = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd u(n);
    for (int k = 0; k < n; ++k) u(k) = x(k / block);
    return u;
  };
  auto accel_of = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd a(n);
    double ak = 0.0;
    for (int k = 0; k < n; ++k) {
      ak = pole * ak + (1.0 - pole) * u(k);
      a(k) = ak;
    }
    return a;
  };

  Eigen::VectorXd best_u = start;
  ProfileScore best = ScoreInput(start, problem);
  // The excitation row is a valid inner approximation from any point, so
  // only the velocity and distance constraints must hold at the start.
  {
    DesignProblem relaxed = problem;
    relaxed.target.r_designed = 0.0;
    if (ScoreInput(start, relaxed).violation > tol) {
      return absl::InvalidArgumentError("SLP start point is infeasible");
    }
  }
  Eigen::VectorXd a_ref = accel_of(start);
  std::vector<int> rows;  // 0-based samples with velocity rows
  for (int j = 1; j <= nb; ++j) rows.push_back(std::min(n, j * block) - 1);
  const SampleBounds base = ResolveSampleBounds(bounds, n, {});

  for (int it = 0; it < settings.slp_iterations; ++it) {
    const Eigen::VectorXd grad = 2.0 * resp.transpose() * a_ref;
    const double ref_sq = a_ref.squaredNorm();
    std::optional<Eigen::VectorXd> x;
    SampleBounds sb = base;
    if (!bounds.IsConstant()) {
      Eigen::VectorXd d(n);
      double dk = 0.0, vk = problem.v0;
      for (int k = 0; k < n; ++k) {
        dk += vk * ts + 0.5 * a_ref(k) * ts * ts;
        vk += ts * a_ref(k);
        d(k) = dk;
      }
      sb = ResolveSampleBounds(bounds, n, d);
    }
    for (int cut = 0; cut < 30; ++cut) {
      const bool r_row = !maximize && problem.target.r_designed > 0.0;
      const bool d_row = bounds.d_max.has_value();
      const int m = 2 * static_cast<int>(rows.size()) + r_row + d_row;
      LinearProgram lp;
      lp.cost = maximize ? Eigen::VectorXd(-grad) : dist_cost;
      lp.a.resize(m, nb);
      lp.b.resize(m);
      int r = 0;
      for (int k : rows) {
        lp.a.row(r) = vel.row(k);
        lp.b(r++) = sb.v_max(k) - problem.v0 - margin;
        lp.a.row(r) = -vel.row(k);
        lp.b(r++) = problem.v0 - sb.v_min(k) - margin;
      }
      if (r_row) {
        lp.a.row(r) = -grad.transpose();
        lp.b(r++) = -(problem.target.r_designed + ref_sq) - margin;
      }
      if (d_row) {
        lp.a.row(r) = dist_cost.transpose();
        lp.b(r++) = *bounds.d_max - dist_offset - margin;
      }
      lp.lower = Eigen::VectorXd::Constant(nb, bounds.UMin());
      lp.upper = Eigen::VectorXd::Constant(nb, bounds.UMax());
      const LpResult res = SolveLp(lp);
      if (res.status != LpStatus::kOptimal) break;
      // Add every sample whose velocity leaves the band.
      const Eigen::VectorXd v =
          (vel * res.x).array() + problem.v0;
      bool added = false;
      for (int k = 0; k < n; ++k) {
        if (v(k) > sb.v_max(k) - margin * 0.5 ||
            v(k) < sb.v_min(k) + margin * 0.5) {
          if (std::find(rows.begin(), rows.end(), k) == rows.end()) {
            rows.push_back(k);
            added = true;
          }
        }
      }
      if (!added) {
        x = res.x;
        break;
      }
    }
    if (!x.has_value()) break;
    const Eigen::VectorXd u = expand(*x);
    const ProfileScore score = ScoreInput(u, problem);
    const double before = ObjectiveOf(best, problem.objective);
    if (!Better(score, best, problem.objective, tol)) break;
    best = score;
    best_u = u;
    a_ref = accel_of(u);
    const double after = ObjectiveOf(best, problem.objective);
    if (std::abs(after - before) <= 1e-7 * std::max(1.0, std::abs(before))) {
      break;
    }
  }
  if (best_u == start) {
    return absl::NotFoundError("SLP made no progress");
  }
  Eigen::VectorXd x(nb);
  for (int j = 0; j < nb; ++j) x(j) = best_u(j * block);
  return Finalize(problem, FromBlocks(x, block), settings);
}

namespace {

struct BlockStep {
  double a_end = 0.0;
  double dv = 0.0;         // velocity change over the block
  double dd = 0.0;         // distance beyond v_start * duration
  double energy = 0.0;
  double v_hi = 0.0;       // extreme velocity changes within the block
  double v_lo = 0.0;
  double overshoot = 0.0;  // see Overshoot, without a horizon limit
  int overshoot_steps = 0;
};

// Overshoot past the current velocity (signed, in the direction of a) while
// the opposite extreme input turns the acceleration around, limited to
// `remaining` samples, and the samples that takes.
std::pair<double, int> Overshoot(double a, double pole, double ts,
                                 double u_lo, double u_hi, int remaining) {
  if (a == 0.0) return {0.0, 0};
  const bool up = a > 0.0;
  const double u = up ? u_lo : u_hi;
  double v = 0.0, extreme = 0.0;
  int j = 0;
  while (j < remaining) {
    a = pole * a + (1.0 - pole) * u;
    v += ts * a;
    extreme = up ? std::max(extreme, v) : std::min(extreme, v);
    ++j;
    if (up ? a <= 0.0 : a >= 0.0) break;
  }
  return {extreme, j};
}

BlockStep SimulateBlock(double a, double u, int length, double pole,
                        double ts, double u_lo, double u_hi, int horizon) {
  BlockStep s;
  s.a_end = a;
  double v = 0.0;
  for (int k = 0; k < length; ++k) {
    s.a_end = pole * s.a_end + (1.0 - pole) * u;
    s.dd += v * ts + 0.5 * s.a_end * ts * ts;
    v += ts * s.a_end;
    s.energy += s.a_end * s.a_end;
    s.v_hi = std::max(s.v_hi, v);
    s.v_lo = std::min(s.v_lo, v);
  }
  s.dv = v;
  std::tie(s.overshoot, s.overshoot_steps) =
      Overshoot(s.a_end, pole, ts, u_lo, u_hi, horizon);
  return s;
}

class DpSolver {
 public:
  DpSolver(const DesignProblem& problem, const DpSettings& settings)
      : problem_(problem),
        n_(problem.grid.n),
        ts_(problem.grid.ts),
        pole_(problem.actuator.pole),
        controls_{problem.bounds.UMin(), 0.0, problem.bounds.UMax()},
        na_(std::max(3, settings.accel_points)),
        nv_(std::max(3, settings.velocity_points)) {
    block_ = std::max(1, (n_ + settings.stages - 1) / std::max(1, settings.stages));
    stages_ = (n_ + block_ - 1) / block_;
    a_lo_ = std::min(problem.bounds.a_min, controls_[0]);
    a_hi_ = std::max(problem.bounds.a_max, controls_[2]);
    v_lo_ = problem.bounds.v_min;
    v_hi_ = problem.bounds.v_max;
    const int last_len = n_ - (stages_ - 1) * block_;
    for (int i = 0; i < na_; ++i) {
      for (double u : controls_) {
        full_.push_back(Step(AccelAt(i), u, block_));
        last_.push_back(Step(AccelAt(i), u, last_len));
      }
    }
  }

  int block() const { return block_; }

  // Backward pass for cost = distance - lambda * excitation (maximize
  // excitation only when lambda is infinite), then an exact forward pass.
  struct Outcome {
    std::vector<int> controls;  // per stage
    double excitation = 0.0;
    double distance = 0.0;
    double violation = 0.0;
  };

  Outcome Solve(double lambda) {
    const bool pure = std::isinf(lambda);
    const double w_dist = pure ? 0.0 : 1.0;
    const double w_energy = pure ? 1.0 : lambda;
    cost_to_go_.assign(static_cast<size_t>(stages_ + 1) * na_ * nv_, 0.0);
    for (int s = stages_ - 1; s >= 0; --s) {
      const std::vector<BlockStep>& table = s == stages_ - 1 ? last_ : full_;
      const int len = s == stages_ - 1 ? n_ - (stages_ - 1) * block_ : block_;
      for (int i = 0; i < na_; ++i) {
        for (int j = 0; j < nv_; ++j) {
          const double v = VelAt(j);
          double best = kInf;
          for (int c = 0; c < 3; ++c) {
            const BlockStep& st = table[i * 3 + c];
            if (v + st.v_hi > v_hi_ + 1e-12 || v + st.v_lo < v_lo_ - 1e-12 ||
                !Recoverable(st, v, n_ - (s * block_ + len))) {
              continue;
            }
            const double stage = w_dist * (v * len * ts_ + st.dd) -
                                 w_energy * st.energy;
            best = std::min(best, stage + Interp(s + 1, st.a_end, v + st.dv));
          }
          J(s, i, j) = best;
        }
      }
    }
    Outcome out;
    double a = 0.0, v = problem_.v0, d = 0.0;
    for (int s = 0; s < stages_; ++s) {
      const int len = s == stages_ - 1 ? n_ - (stages_ - 1) * block_ : block_;
      // Ranked by (violation, unrecoverable, infinite cost-to-go, value).
      int pick = -1;
      std::tuple<double, bool, bool, double> best_key;
      BlockStep chosen;
      for (int c = 0; c < 3; ++c) {
        const BlockStep st = Step(a, controls_[c], len);
        const double viol = std::max(0.0, v + st.v_hi - v_hi_) +
                            std::max(0.0, v_lo_ - (v + st.v_lo));
        const bool stuck =
            !Recoverable(st, v, n_ - (s * block_ + len));
        const double value = w_dist * (v * len * ts_ + st.dd) -
                             w_energy * st.energy +
                             Interp(s + 1, st.a_end, v + st.dv);
        const auto key = std::make_tuple(viol, stuck, !std::isfinite(value),
                                         std::isfinite(value) ? value : 0.0);
        if (pick < 0 || key < best_key) {
          best_key = key;
          pick = c;
          chosen = st;
        }
      }
      out.controls.push_back(pick);
      out.violation += std::max(0.0, v + chosen.v_hi - v_hi_) +
                       std::max(0.0, v_lo_ - (v + chosen.v_lo));
      d += v * len * ts_ + chosen.dd;
      v += chosen.dv;
      a = chosen.a_end;
      out.excitation += chosen.energy;
    }
    out.distance = d;
    return out;
  }

  ProfileParam ToParam(const std::vector<int>& controls) const {
    ProfileParam p;
    for (int s = 0; s < stages_; ++s) {
      const double level = controls_[controls[s]];
      if (s == 0) {
        p.levels.push_back(level);
      } else if (level != p.levels.back()) {
        p.switch_times.push_back(s * block_ + 1);
        p.levels.push_back(level);
      }
    }
    return p;
  }

 private:
  BlockStep Step(double a, double u, int length) const {
    return SimulateBlock(a, u, length, pole_, ts_, controls_[0], controls_[2],
                         n_);
  }

  // The opposite extreme input can still keep the velocity in the band
  // after the block.
  bool Recoverable(const BlockStep& st, double v, int remaining) const {
    double over = st.overshoot;
    if (remaining < st.overshoot_steps) {
      over = Overshoot(st.a_end, pole_, ts_, controls_[0], controls_[2],
                       remaining)
                 .first;
    }
    const double end = v + st.dv + over;
    return st.a_end > 0.0 ? end <= v_hi_ + 1e-12 : end >= v_lo_ - 1e-12;
  }

  double AccelAt(int i) const {
    return a_lo_ + (a_hi_ - a_lo_) * i / (na_ - 1);
  }
  double VelAt(int j) const {
    return v_lo_ + (v_hi_ - v_lo_) * j / (nv_ - 1);
  }
  double& J(int s, int i, int j) {
    return cost_to_go_[(static_cast<size_t>(s) * na_ + i) * nv_ + j];
  }
  double Interp(int s, double a, double v) {
    if (s >= stages_) return 0.0;
    if (v < v_lo_ - 1e-9 || v > v_hi_ + 1e-9) return kInf;
    const double x = std::clamp((a - a_lo_) / (a_hi_ - a_lo_) * (na_ - 1),
                                0.0, na_ - 1.0);
    const double y = v_hi_ > v_lo_
                         ? std::clamp((v - v_lo_) / (v_hi_ - v_lo_) * (nv_ - 1),
                                      0.0, nv_ - 1.0)
                         : 0.0;
    const int i0 = std::min(static_cast<int>(x), na_ - 2);
    const int j0 = std::min(static_cast<int>(y), nv_ - 2);
    const double fx = x - i0, fy = y - j0;
    const double c00 = J(s, i0, j0), c10 = J(s, i0 + 1, j0);
    const double c01 = J(s, i0, j0 + 1), c11 = J(s, i0 + 1, j0 + 1);
    // An infeasible corner makes the cell infeasible unless the point sits
    // on a feasible corner's side.
    double total = 0.0, weight = 0.0;
    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy,
                         fx * fy};
    const double c[4] = {c00, c10, c01, c11};
    for (int q = 0; q < 4; ++q) {
      if (w[q] <= 0.0) continue;
      if (!std::isfinite(c[q])) {
        if (w[q] > 0.5) return kInf;
        continue;
      }
      total += w[q] * c[q];
      weight += w[q];
    }
    return weight > 0.0 ? total / weight : kInf;
  }

  const DesignProblem& problem_;
  const int n_;
  const double ts_;
  const double pole_;
  const double controls_[3];
  const int na_;
  const int nv_;
  int block_ = 1;
  int stages_ = 1;
  double a_lo_ = 0.0, a_hi_ = 0.0, v_lo_ = 0.0, v_hi_ = 0.0;
  std::vector<BlockStep> full_;
  std::vector<BlockStep> last_;
  std::vector<double> cost_to_go_;
};

}  // namespace

absl::StatusOr<std::vector<ProfileParam>> DynamicProgrammingSeed(
    const DesignProblem& problem, const DpSettings& settings) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (!problem.bounds.IsConstant()) {
    return absl::UnimplementedError(
        "dynamic-programming seed needs constant bounds");
  }
  DpSolver dp(problem, settings);
  const double r = problem.target.r_designed;
  if (problem.objective != Objective::kMinDistance || r <= 0.0) {
    const double lambda = problem.objective == Objective::kMinDistance
                              ? 0.0
                              : kInf;
    return std::vector<ProfileParam>{dp.ToParam(dp.Solve(lambda).controls)};
  }
  // Smallest multiplier whose policy reaches the excitation target.
  double lo = 0.0, hi = 1e-3;
  DpSolver::Outcome best = dp.Solve(hi);
  while (best.excitation < r && hi < 1e6) {
    lo = hi;
    hi *= 4.0;
    best = dp.Solve(hi);
  }
  if (best.excitation < r) {
    return std::vector<ProfileParam>{dp.ToParam(dp.Solve(kInf).controls)};
  }
  DpSolver::Outcome below;
  for (int it = 0; it < settings.bisection_steps && hi - lo > 1e-6 * hi;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    DpSolver::Outcome o = dp.Solve(mid);
    if (o.excitation >= r && o.violation <= 1e-12) {
      hi = mid;
      best = std::move(o);
    } else {
      lo = mid;
      if (o.violation <= 1e-12) below = std::move(o);
    }
  }
  std::vector<ProfileParam> out = {dp.ToParam(best.controls)};
  if (!below.controls.empty()) out.push_back(dp.ToParam(below.controls));
  return out;
}

absl::StatusOr<SolveReport> SolveProfileParameterized(
    const DesignProblem& problem, const std::vector<ProfileParam>& seeds,
    const SearchSettings& settings) {
  absl::StatusOr<ParameterizedResult> r =
      SearchProfile(problem, seeds, settings);
  if (!r.ok()) return r.status();
  return r->report;
}

absl::StatusOr<ParameterizedMinTime> SolveMinTimeParameterized(
    const DesignProblem& problem, int n_max, const SearchSettings& settings) {
  if (n_max < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_max must be positive, got ", n_max));
  }
  const double vmin = problem.bounds.v_min, vmax = problem.bounds.v_max;
  SearchSettings probe_settings = settings;
  probe_settings.slp_refine = false;
  auto attempt =
      [&](int n) -> absl::StatusOr<ParameterizedResult> {
    DesignProblem p = WithHorizon(problem, n);
    p.objective = Objective::kMinTime;
    std::vector<ProfileParam> seeds = {
        LagAwareBangBang(p, n, vmin, vmax),
        BangBangTemplate(n, 1, p.bounds.UMax(), p.bounds.UMin()),
        BangBangTemplate(n, 2, p.bounds.UMax(), p.bounds.UMin())};
    return SearchProfile(p, seeds, probe_settings);
  };

  // The lag-aware profile run until it reaches the target bounds n_star
  // from above.
  DesignProblem probe = WithHorizon(problem, n_max);
  const ProfileParam greedy = LagAwareBangBang(probe, n_max, vmin, vmax);
  absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(greedy, n_max);
  if (!u.ok()) return u.status();
  const absl::StatusOr<Profile> sim =
      SimulateProfile(*u, problem.actuator, probe.grid, problem.v0);
  if (!sim.ok()) return sim.status();
  const Eigen::VectorXd r_trace = ExcitationTrace(sim->a);
  int hi = 0;
  for (int k = 0; k < n_max; ++k) {
    if (r_trace(k) >= problem.target.r_designed) {
      hi = k + 1;
      break;
    }
  }
  absl::StatusOr<ParameterizedResult> best;
  if (hi == 0) {
    best = attempt(n_max);
    if (!best.ok()) {
      return absl::NotFoundError(absl::StrCat(
          "excitation target ", problem.target.r_designed,
          " not reached within ", n_max, " samples"));
    }
    hi = n_max;
  } else {
    best = attempt(hi);
    if (!best.ok()) return best.status();
  }
  int lo = ExcitationLowerBound(problem) - 1;  // infeasible
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    absl::StatusOr<ParameterizedResult> r = attempt(mid);
    if (r.ok()) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  if (settings.slp_refine) {
    DesignProblem p = WithHorizon(problem, hi);
    p.objective = Objective::kMinTime;
    absl::StatusOr<ParameterizedResult> refined =
        RefineBySlp(p, best->report.u_star, settings);
    if (refined.ok()) best = std::move(refined);
  }
  return ParameterizedMinTime{hi, *std::move(best)};
}

absl::StatusOr<ParameterizedResult> SolveMinDistanceParameterized(
    const DesignProblem& problem, const SearchSettings& settings) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  const int n = problem.grid.n;
  const Bounds& b = problem.bounds;
  const double dv = b.v_max - b.v_min;
  // Samples for a full ramp, padded by the actuator settling time.
  const double lag = problem.actuator.pole / (1.0 - problem.actuator.pole);
  const int ramp = static_cast<int>(
      std::ceil(dv / (problem.grid.ts * b.a_max) + lag));
  std::vector<ProfileParam> seeds;
  for (double frac : {0.03, 0.06, 0.1, 0.15, 0.25, 0.4, 0.6, 1.0}) {
    for (double stretch : {0.0, 0.5, 0.8, 1.0, 1.2}) {
      const int from = std::clamp(
          n - static_cast<int>(std::round(stretch * ramp)) + 1, 1, n + 1);
      seeds.push_back(LagAwareBangBang(problem, n, b.v_min,
                                       b.v_min + frac * dv,
                                       from <= n ? from : 0));
    }
  }
  std::vector<ProfileParam> dp_seeds;
  if (b.IsConstant()) {
    absl::StatusOr<std::vector<ProfileParam>> dp =
        DynamicProgrammingSeed(problem);
    if (dp.ok()) dp_seeds = *std::move(dp);
  }
  seeds.insert(seeds.begin(), dp_seeds.begin(), dp_seeds.end());
  absl::StatusOr<ParameterizedResult> best =
      SearchProfile(problem, seeds, settings);
  if (!settings.slp_refine) return best;
  // The search keeps one winner; each dynamic-programming policy also gets
  // its own refinement since they sit in different basins.
  const double tol = settings.feasibility_tol;
  SearchSettings dp_refine = settings;
  dp_refine.slp_blocks = DpSettings{}.stages;  // same block length
  for (const ProfileParam& seed : dp_seeds) {
    absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(seed, n);
    if (!u.ok()) continue;
    absl::StatusOr<ParameterizedResult> refined =
        RefineBySlp(problem, *u, dp_refine);
    if (!refined.ok()) continue;
    if (!best.ok() ||
        Better(ScoreInput(refined->report.u_star, problem),
               ScoreInput(best->report.u_star, problem), problem.objective,
               tol)) {
      best = std::move(refined);
    }
  }
  return best;
}

}  // namespace vmass
