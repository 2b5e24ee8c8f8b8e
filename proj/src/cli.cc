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

#include "vmass/cli.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "vmass/analytic_profiles.h"
#include "vmass/profile_search.h"
#include "vmass/sim_harness.h"
#include "vmass/wiener_filter.h"

namespace vmass {
namespace {

using Json = nlohmann::json;

Json JsonNum(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

DesignProblem WithHorizon(const DesignProblem& p, int n) {
  DesignProblem q = p;
  q.grid.n = n;
  return q;
}

SolveReport InfeasibleReport(std::string message) {
  SolveReport r;
  r.status = SolveStatus::kInfeasible;
  r.certified = false;
  r.gap = std::nan("");
  r.message = std::move(message);
  return r;
}

// Best excitation the lag-aware bang-bang reaches on n samples; an
// uncertified indication of what is achievable.
double GreedyExcitation(const DesignProblem& p, int n) {
  const DesignProblem q = WithHorizon(p, n);
  absl::StatusOr<Eigen::VectorXd> u = ExpandProfileParam(
      LagAwareBangBang(q, n, q.bounds.v_min, q.bounds.v_max), n);
  if (!u.ok()) return 0.0;
  return ScoreInput(*u, q).excitation;
}

absl::Status AttachProfile(const DesignProblem& p, DesignOutcome& out) {
  if (out.report.u_star.size() != out.n || out.n == 0) return absl::OkStatus();
  absl::StatusOr<SamplingGrid> grid = SamplingGrid::Create(p.grid.ts, out.n);
  if (!grid.ok()) return grid.status();
  absl::StatusOr<Profile> prof =
      SimulateProfile(out.report.u_star, p.actuator, *grid, p.v0);
  if (!prof.ok()) return prof.status();
  out.profile = *std::move(prof);
  return absl::OkStatus();
}

absl::StatusOr<DesignOutcome> DesignMinTime(const RunConfig& c) {
  DesignProblem p = c.problem;
  p.objective = Objective::kMinTime;
  const int n_max = c.n_max > 0 ? c.n_max : p.grid.n;
  DesignOutcome out;
  out.objective = Objective::kMinTime;
  if (n_max <= c.bnb.max_n) {
    absl::StatusOr<MinTimeResult> r = SolveMinTime(p, 1, n_max, c.bnb);
    if (!r.ok()) return r.status();
    out.certified_path = true;
    out.n = r->n_star;
    out.report = r->report;
    if (r->n_star == 0) out.report.u_star.resize(0);
  } else {
    absl::StatusOr<ParameterizedMinTime> r =
        SolveMinTimeParameterized(p, n_max, c.search);
    if (absl::IsNotFound(r.status())) {
      out.report = InfeasibleReport(absl::StrCat(
          r.status().message(), " (best excitation found ",
          GreedyExcitation(p, n_max), ", not certified)"));
      return out;
    }
    if (!r.ok()) return r.status();
    out.n = r->n_star;
    out.report = r->result.report;
  }
  if (absl::Status s = AttachProfile(p, out); !s.ok()) return s;
  return out;
}

}  // namespace

ExitCode ExitCodeFor(const SolveReport& report) {
  switch (report.status) {
    case SolveStatus::kOptimal:
    case SolveStatus::kGapReached:
      return kExitOk;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
    case SolveStatus::kBudgetExhausted:
      return kExitBudgetExhausted;
  }
  return kExitError;
}

absl::StatusOr<DesignOutcome> Design(const RunConfig& config) {
  const Objective objective = config.problem.objective;
  if (objective == Objective::kMinTime) return DesignMinTime(config);

  DesignOutcome out;
  out.objective = objective;
  DesignProblem p = config.problem;
  int n = p.grid.n;
  if (objective == Objective::kMinDistance && !config.grid_n_set) {
    if (!config.extra_time_s.has_value()) {
      return absl::InvalidArgumentError(
          "min_distance needs grid.n or design.extra_time_s");
    }
    absl::StatusOr<DesignOutcome> mt = DesignMinTime(config);
    if (!mt.ok()) return mt.status();
    if (mt->n == 0) {
      mt->objective = objective;
      return mt;
    }
    out.min_time_n = mt->n;
    out.min_time_distance = mt->profile->d(mt->n - 1);
    n = mt->n + static_cast<int>(std::lround(*config.extra_time_s / p.grid.ts));
  } else if (!config.grid_n_set) {
    return absl::InvalidArgumentError(
        absl::StrCat(ToString(objective), " needs grid.n"));
  }
  p = WithHorizon(p, n);
  out.n = n;
  if (n <= config.bnb.max_n) {
    absl::StatusOr<SolveReport> r = SolveFixedHorizon(p, config.bnb);
    if (!r.ok()) return r.status();
    out.certified_path = true;
    out.report = *std::move(r);
  } else if (objective == Objective::kMinDistance) {
    absl::StatusOr<ParameterizedResult> r =
        SolveMinDistanceParameterized(p, config.search);
    if (absl::IsNotFound(r.status())) {
      out.report = InfeasibleReport(absl::StrCat(
          r.status().message(), " (best excitation found ",
          GreedyExcitation(p, n), ", not certified)"));
      return out;
    }
    if (!r.ok()) return r.status();
    out.report = r->report;
  } else {
    std::vector<ProfileParam> seeds = {
        LagAwareBangBang(p, n, p.bounds.v_min, p.bounds.v_max)};
    if (p.bounds.IsConstant()) {
      absl::StatusOr<std::vector<ProfileParam>> dp = DynamicProgrammingSeed(p);
      if (dp.ok()) seeds.insert(seeds.begin(), dp->begin(), dp->end());
    }
    absl::StatusOr<ParameterizedResult> r =
        SearchProfile(p, seeds, config.search);
    if (absl::IsNotFound(r.status())) {
      out.report = InfeasibleReport(std::string(r.status().message()));
      return out;
    }
    if (!r.ok()) return r.status();
    out.report = r->report;
  }
  if (out.report.status == SolveStatus::kInfeasible) {
    out.report.u_star.resize(0);
  }
  if (absl::Status s = AttachProfile(p, out); !s.ok()) return s;
  return out;
}

namespace {

struct Globals {
  std::string config_path;
  std::string preset;
  std::optional<long> seed;
  std::string output;
};

ExitCode CodeForStatus(const absl::Status& s) {
  if (s.ok()) return kExitOk;
  if (absl::IsInvalidArgument(s)) return kExitParseError;
  return kExitError;
}

int Fail(std::ostream& err, const absl::Status& s) {
  err << "error: " << s.message() << "\n";
  return CodeForStatus(s);
}

absl::StatusOr<RunConfig> LoadRunConfig(const Globals& g) {
  RunConfig c;
  if (!g.config_path.empty()) {
    absl::StatusOr<RunConfig> loaded = LoadConfig(g.config_path);
    if (!loaded.ok()) return loaded.status();
    c = *std::move(loaded);
    if (!g.preset.empty() && c.preset != g.preset) {
      return absl::InvalidArgumentError(
          "--preset conflicts with the preset named in the config file");
    }
  } else if (!g.preset.empty()) {
    absl::StatusOr<RunConfig> p = Preset(g.preset);
    if (!p.ok()) return absl::InvalidArgumentError(p.status().message());
    c = *std::move(p);
  } else {
    absl::StatusOr<RunConfig> empty = ParseConfig("");
    if (!empty.ok()) return empty.status();
    c = *std::move(empty);
  }
  if (g.seed.has_value()) {
    c.sim.seed = static_cast<uint64_t>(*g.seed);
    c.search.seed = static_cast<uint64_t>(*g.seed);
  }
  return c;
}

// Writes to --output, or to `out` when no path was given.
absl::Status Emit(const Globals& g, std::ostream& out, const std::string& s) {
  if (g.output.empty() || g.output == "-") {
    out << s;
    return absl::OkStatus();
  }
  return WriteFile(g.output, s);
}

std::string DesignReportJson(const DesignOutcome& o, const DesignProblem& p) {
  Json j;
  j["objective"] = ToString(o.objective);
  j["method"] = o.certified_path ? "branch_and_bound" : "parameterized_search";
  j["n"] = o.n;
  j["ts"] = p.grid.ts;
  j["duration_s"] = o.n * p.grid.ts;
  if (o.profile.has_value() && o.n > 0) {
    j["final_distance"] = JsonNum(o.profile->d(o.n - 1));
    j["r_achieved"] = JsonNum(o.profile->a.squaredNorm());
    j["v_peak"] = JsonNum(o.profile->v.maxCoeff());
  }
  j["r_designed"] = p.target.r_designed;
  if (o.min_time_n.has_value()) {
    j["min_time_n"] = *o.min_time_n;
    j["min_time_distance"] = JsonNum(*o.min_time_distance);
  }
  j["report"] = Json::parse(SolveReportToJson(o.report));
  j["report"].erase("u_star");
  return j.dump(2) + "\n";
}

int CmdDesign(const Globals& g, const std::string& objective,
              const std::string& report_path, std::ostream& out,
              std::ostream& err) {
  absl::StatusOr<RunConfig> c = LoadRunConfig(g);
  if (!c.ok()) return Fail(err, c.status());
  if (!objective.empty()) {
    absl::StatusOr<Objective> o = ParseObjective(objective);
    if (!o.ok()) return Fail(err, absl::InvalidArgumentError(o.status().message()));
    c->problem.objective = *o;
  }
  absl::StatusOr<DesignOutcome> d = Design(*c);
  if (!d.ok()) return Fail(err, d.status());
  const std::string report = DesignReportJson(*d, c->problem);
  if (!report_path.empty()) {
    if (absl::Status s = WriteFile(report_path, report); !s.ok()) {
      return Fail(err, s);
    }
  }
  const ExitCode code = ExitCodeFor(d->report);
  if (code == kExitInfeasible) {
    err << "infeasible: " << d->report.message << "\n";
    if (report_path.empty()) err << report;
    return code;
  }
  if (d->profile.has_value()) {
    if (absl::Status s = Emit(g, out, FormatProfile(*d->profile)); !s.ok()) {
      return Fail(err, s);
    }
  }
  err << absl::StrFormat(
      "%s: n=%d (%.4g s) status=%s objective=%.10g\n",
      ToString(d->objective), d->n, d->n * c->problem.grid.ts,
      ToString(d->report.status), d->report.objective_value);
  if (code == kExitBudgetExhausted) {
    err << "budget exhausted: gap " << d->report.gap << "\n";
  }
  return code;
}

absl::StatusOr<DriveLog> LoadLog(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<DriveLog> log = ParseDriveLog(*text);
  if (!log.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", log.status().message()));
  }
  return log;
}

int CmdEstimate(const Globals& g, const std::string& log_path, bool wiener,
                bool offset, std::ostream& out, std::ostream& err) {
  absl::StatusOr<RunConfig> c = LoadRunConfig(g);
  if (!c.ok()) return Fail(err, c.status());
  absl::StatusOr<DriveLog> log = LoadLog(log_path);
  if (!log.ok()) return Fail(err, log.status());
  PipelineOptions opt;
  opt.use_wiener = wiener;
  opt.use_offset = offset;
  opt.r_designed = c->problem.target.r_designed;
  absl::StatusOr<PipelineResult> res = RunPipeline(*log, opt);
  if (absl::IsInvalidArgument(res.status()) ||
      absl::IsFailedPrecondition(res.status())) {
    // Unidentifiable data is a property of the log, not of its syntax.
    err << "error: " << res.status().message() << "\n";
    return kExitError;
  }
  if (!res.ok()) return Fail(err, res.status());
  std::optional<QualityTarget> target;
  QualityTarget t = c->problem.target;
  if (t.r_designed > 0.0 && t.m_nominal > 0.0 && t.sigma_e2 > 0.0) {
    if (t.chi2 == 0.0) {
      t.n_params = offset ? 2 : 1;
      t = WithChi2FromAlpha(t);
    }
    target = t;
  }
  Json j = Json::parse(MassEstimateToJson(res->estimate, target));
  j.erase("r_trace");
  j["wiener"] = wiener;
  j["offset"] = offset;
  if (res->wiener.has_value()) {
    j["wiener_xi"] = JsonNum(res->wiener->model.xi);
    j["wiener_gamma_ratio"] = JsonNum(res->wiener->model.gamma_ratio);
    j["wiener_fit_status"] = ToString(res->wiener->status);
  }
  if (opt.r_designed > 0.0) {
    j["first_index_reaching"] =
        res->first_index_reaching > 0 ? Json(res->first_index_reaching)
                                      : Json(nullptr);
  }
  if (absl::Status s = Emit(g, out, j.dump(2) + "\n"); !s.ok()) {
    return Fail(err, s);
  }
  return kExitOk;
}

int CmdFilter(const Globals& g, const std::string& log_path, std::ostream& out,
              std::ostream& err) {
  absl::StatusOr<DriveLog> log = LoadLog(log_path);
  if (!log.ok()) return Fail(err, log.status());
  absl::StatusOr<SmoothedSignal> s = WienerSmooth(log->a_meas);
  if (!s.ok()) {
    err << "error: " << s.status().message() << "\n";
    return kExitError;
  }
  DriveLog filtered = *log;
  filtered.a_meas = s->filtered;
  if (absl::Status st = Emit(g, out, FormatDriveLog(filtered)); !st.ok()) {
    return Fail(err, st);
  }
  const WienerModel& m = s->fit.model;
  err << absl::StrFormat(
      "xi=%.10g gamma_ratio=%.10g sigma_a2=%.10g beta=%.10g c=%.10g "
      "status=%s\n",
      m.xi, m.gamma_ratio, m.sigma_a2, m.beta, m.c, ToString(s->fit.status));
  return kExitOk;
}

int CmdSimulate(const Globals& g, const std::string& profile_path, int trial,
                bool monte_carlo, bool wiener, std::ostream& out,
                std::ostream& err) {
  absl::StatusOr<RunConfig> c = LoadRunConfig(g);
  if (!c.ok()) return Fail(err, c.status());
  Profile profile;
  if (!profile_path.empty()) {
    absl::StatusOr<std::string> text = ReadFile(profile_path);
    if (!text.ok()) return Fail(err, text.status());
    absl::StatusOr<Profile> p = ParseProfile(*text);
    if (!p.ok()) {
      return Fail(err, absl::InvalidArgumentError(
                           absl::StrCat(profile_path, ": ", p.status().message())));
    }
    profile = *std::move(p);
  } else {
    absl::StatusOr<DesignOutcome> d = Design(*c);
    if (!d.ok()) return Fail(err, d.status());
    if (!d->profile.has_value()) {
      err << "infeasible: " << d->report.message << "\n";
      return kExitInfeasible;
    }
    profile = *d->profile;
  }
  if (!monte_carlo) {
    if (trial < 0) {
      return Fail(err, absl::InvalidArgumentError("--trial must be >= 0"));
    }
    absl::StatusOr<DriveLog> log =
        SynthesizeLog(profile, c->sim, static_cast<uint64_t>(trial));
    if (!log.ok()) return Fail(err, log.status());
    if (absl::Status s = Emit(g, out, FormatDriveLog(*log)); !s.ok()) {
      return Fail(err, s);
    }
    return kExitOk;
  }
  QualityTarget t = c->problem.target;
  if (t.r_designed <= 0.0) t.r_designed = profile.a.squaredNorm();
  CoverageOptions opt;
  opt.use_wiener = wiener;
  absl::StatusOr<CoverageReport> rep = MonteCarlo(profile, c->sim, t, opt);
  if (absl::IsFailedPrecondition(rep.status())) {
    err << "infeasible: " << rep.status().message() << "\n";
    return kExitInfeasible;
  }
  if (!rep.ok()) return Fail(err, rep.status());
  if (absl::Status s = Emit(g, out, CoverageReportToJson(*rep)); !s.ok()) {
    return Fail(err, s);
  }
  err << absl::StrFormat("coverage %.4f +- %.4f over %d trials\n",
                         rep->fraction, rep->standard_error, c->sim.trials);
  return kExitOk;
}

int CmdAnalyze(const Globals& g, bool gap_grid, std::ostream& out,
               std::ostream& err) {
  absl::StatusOr<RunConfig> c = LoadRunConfig(g);
  if (!c.ok()) return Fail(err, c.status());
  const Bounds& b = c->problem.bounds;
  const double ts = c->problem.grid.ts;
  const double r = c->problem.target.r_designed;
  absl::StatusOr<PeriodicProfile> per = BuildPeriodicProfile(b, ts, r);
  if (!per.ok()) {
    return Fail(err, absl::InvalidArgumentError(per.status().message()));
  }
  const DStarResult ds = DStar(b, ts, r);
  std::string s;
  absl::StrAppendFormat(&s, "n_plus %d\n", per->spec.n_plus);
  absl::StrAppendFormat(&s, "n_minus %d\n", per->spec.n_minus);
  absl::StrAppendFormat(&s, "m_periods %d\n", per->spec.m_periods);
  absl::StrAppendFormat(&s, "total_n %d\n", per->spec.total_n);
  absl::StrAppendFormat(&s, "critical_vmax %.17g\n",
                        CriticalVmax(b.a_max, b.a_min, b.v_min));
  absl::StrAppendFormat(&s, "critical_ratio_holds %s\n",
                        ds.critical_ratio_holds ? "true" : "false");
  absl::StrAppendFormat(&s, "d_star %.17g\n", ds.distance);
  absl::StrAppendFormat(&s, "d_time %.17g\n", DTimeFormula(b, ts, r));
  absl::StrAppendFormat(&s, "d_distance_limit %.17g\n",
                        DistanceOptimalLimit(b, ts, r));
  absl::StrAppendFormat(&s, "d_time_periodic %.17g\n",
                        per->profile.d(per->profile.d.size() - 1));
  if (gap_grid) {
    const int points = c->gap_points;
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
      grid.push_back((b.v_max - b.v_min) * i / (points - 1));
    }
    absl::StatusOr<GapReport> gap = AnalyzeGap(b, ts, r, grid);
    if (!gap.ok()) {
      return Fail(err, absl::InvalidArgumentError(gap.status().message()));
    }
    absl::StrAppendFormat(&s, "delta_v_star %.17g\n", gap->delta_v_star);
    absl::StrAppendFormat(&s, "strictly_increasing %s\n",
                          gap->strictly_increasing ? "true" : "false");
    absl::StrAppend(&s, "delta_v,d_time,d_distance,delta_d\n");
    for (const GapAnalysis& row : gap->rows) {
      absl::StrAppendFormat(&s, "%.17g,%.17g,%.17g,%.17g\n", row.delta_v,
                            row.d_time, row.d_distance, row.delta_d);
    }
  }
  if (absl::Status st = Emit(g, out, s); !st.ok()) return Fail(err, st);
  return kExitOk;
}

int CmdExportLifted(const Globals& g, std::ostream& out, std::ostream& err) {
  absl::StatusOr<RunConfig> c = LoadRunConfig(g);
  if (!c.ok()) return Fail(err, c.status());
  if (!c->grid_n_set) {
    return Fail(err, absl::InvalidArgumentError("export-lifted needs grid.n"));
  }
  if (c->problem.grid.n > c->bnb.max_n) {
    return Fail(err, absl::InvalidArgumentError(absl::StrCat(
                         "grid.n = ", c->problem.grid.n,
                         " exceeds solver.max_n = ", c->bnb.max_n)));
  }
  absl::StatusOr<LiftedProblem> lifted = LiftProblem(c->problem);
  if (!lifted.ok()) return Fail(err, lifted.status());
  if (absl::Status s = Emit(g, out, FormatLiftedTriplets(*lifted)); !s.ok()) {
    return Fail(err, s);
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Excitation design and mass estimation for vehicles", "vmass"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Configuration file");
  app.add_option("--preset", g.preset, "Built-in parameter set")
      ->check(CLI::IsMember(PresetNames()));
  app.add_option("--seed", g.seed, "Seed for simulation and search");
  app.add_option("--output", g.output, "Output file (default: stdout)");

  std::string objective, report_path;
  CLI::App* design = app.add_subcommand("design", "Design an input profile");
  design->add_option("--objective", objective,
                     "min_time, min_distance or max_accuracy");
  design->add_option("--report", report_path, "Write the JSON solve report");

  std::string log_path;
  bool wiener = false, offset = false;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate the mass");
  estimate->add_option("--log", log_path, "Drive log CSV")->required();
  estimate->add_flag("--wiener", wiener, "Smooth a_meas first");
  estimate->add_flag("--offset", offset, "Also fit a constant force offset");

  std::string filter_log;
  CLI::App* filter =
      app.add_subcommand("filter", "Smooth a drive log's acceleration");
  filter->add_option("--log", filter_log, "Drive log CSV")->required();

  std::string profile_path;
  int trial = 0;
  bool monte_carlo = false, mc_wiener = false;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Synthesize drive logs or coverage");
  simulate->add_option("--profile", profile_path,
                       "Profile CSV (default: design from the config)");
  simulate->add_option("--trial", trial, "Trial index of the log");
  simulate->add_flag("--monte-carlo", monte_carlo,
                     "Run sim.trials trials and report coverage");
  simulate->add_flag("--wiener", mc_wiener, "Smooth in the coverage runs");

  bool gap_grid = false;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Closed-form profile analysis");
  analyze->add_flag("--gap-grid", gap_grid, "Print the distance-gap table");

  CLI::App* export_lifted = app.add_subcommand(
      "export-lifted", "Write the lifted system as sparse triplets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParseError;
  }
  if (design->parsed()) return CmdDesign(g, objective, report_path, out, err);
  if (estimate->parsed()) {
    return CmdEstimate(g, log_path, wiener, offset, out, err);
  }
  if (filter->parsed()) return CmdFilter(g, filter_log, out, err);
  if (simulate->parsed()) {
    return CmdSimulate(g, profile_path, trial, monte_carlo, mc_wiener, out,
                       err);
  }
  if (analyze->parsed()) return CmdAnalyze(g, gap_grid, out, err);
  if (export_lifted->parsed()) return CmdExportLifted(g, out, err);
  return kExitParseError;
}

}  // namespace vmass
