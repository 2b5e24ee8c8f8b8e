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

#include "vmass/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"

namespace vmass {
namespace {

using Json = nlohmann::json;

constexpr double kKmh = 3.6;

// Strict decimal parse: the whole field, finite, '.' as the only decimal
// separator.
std::optional<double> ParseDouble(absl::string_view s) {
  s = absl::StripAsciiWhitespace(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    return std::nullopt;
  }
  return x;
}

std::optional<long> ParseLong(absl::string_view s) {
  s = absl::StripAsciiWhitespace(s);
  long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return x;
}

std::optional<bool> ParseBool(absl::string_view s) {
  const std::string v = absl::AsciiStrToLower(absl::StripAsciiWhitespace(s));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  return std::nullopt;
}

std::string Num(double x) { return absl::StrFormat("%.17g", x); }

Json JsonNum(double x) {
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

double FromJsonNum(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN()
                     : j.get<double>();
}

Json JsonVec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(JsonNum(v(i)));
  return a;
}

struct ParseState {
  RunConfig config;
  std::map<int, BoundSegment> segments;
};

using Setter = std::function<absl::Status(ParseState&, absl::string_view)>;

absl::Status BadValue(absl::string_view what, absl::string_view value) {
  return absl::InvalidArgumentError(
      absl::StrCat("expected ", what, ", got '", value, "'"));
}

Setter Real(std::function<void(ParseState&, double)> set, double scale = 1.0) {
  return [set, scale](ParseState& st, absl::string_view v) -> absl::Status {
    const std::optional<double> x = ParseDouble(v);
    if (!x.has_value()) return BadValue("a number", v);
    set(st, *x / scale);
    return absl::OkStatus();
  };
}

Setter Integer(std::function<void(ParseState&, long)> set) {
  return [set](ParseState& st, absl::string_view v) -> absl::Status {
    const std::optional<long> x = ParseLong(v);
    if (!x.has_value()) return BadValue("an integer", v);
    set(st, *x);
    return absl::OkStatus();
  };
}

Setter Flag(std::function<void(ParseState&, bool)> set) {
  return [set](ParseState& st, absl::string_view v) -> absl::Status {
    const std::optional<bool> x = ParseBool(v);
    if (!x.has_value()) return BadValue("true or false", v);
    set(st, *x);
    return absl::OkStatus();
  };
}

const std::map<std::string, Setter>& FixedKeys() {
  static const auto* keys = new std::map<std::string, Setter>{
      {"design.objective",
       [](ParseState& st, absl::string_view v) -> absl::Status {
         absl::StatusOr<Objective> o =
             ParseObjective(std::string(absl::StripAsciiWhitespace(v)));
         if (!o.ok()) return o.status();
         st.config.problem.objective = *o;
         return absl::OkStatus();
       }},
      {"design.n_max",
       Integer([](ParseState& st, long x) { st.config.n_max = x; })},
      {"design.extra_time_s",
       Real([](ParseState& st, double x) { st.config.extra_time_s = x; })},
      {"design.v0", Real([](ParseState& st, double x) {
         st.config.problem.v0 = x;
         st.config.v0_set = true;
       })},
      {"design.v0_kmh", Real(
                            [](ParseState& st, double x) {
                              st.config.problem.v0 = x;
                              st.config.v0_set = true;
                            },
                            kKmh)},
      {"grid.ts",
       Real([](ParseState& st, double x) { st.config.problem.grid.ts = x; })},
      {"grid.n", Integer([](ParseState& st, long x) {
         st.config.problem.grid.n = static_cast<int>(x);
         st.config.grid_n_set = true;
       })},
      {"actuator.pole", Real([](ParseState& st, double x) {
         st.config.problem.actuator.pole = x;
       })},
      {"bounds.a_min", Real([](ParseState& st, double x) {
         st.config.problem.bounds.a_min = x;
       })},
      {"bounds.a_max", Real([](ParseState& st, double x) {
         st.config.problem.bounds.a_max = x;
       })},
      {"bounds.v_min", Real([](ParseState& st, double x) {
         st.config.problem.bounds.v_min = x;
       })},
      {"bounds.v_max", Real([](ParseState& st, double x) {
         st.config.problem.bounds.v_max = x;
       })},
      {"bounds.v_min_kmh", Real(
                               [](ParseState& st, double x) {
                                 st.config.problem.bounds.v_min = x;
                               },
                               kKmh)},
      {"bounds.v_max_kmh", Real(
                               [](ParseState& st, double x) {
                                 st.config.problem.bounds.v_max = x;
                               },
                               kKmh)},
      {"bounds.u_min", Real([](ParseState& st, double x) {
         st.config.problem.bounds.u_min = x;
       })},
      {"bounds.u_max", Real([](ParseState& st, double x) {
         st.config.problem.bounds.u_max = x;
       })},
      {"bounds.d_max", Real([](ParseState& st, double x) {
         st.config.problem.bounds.d_max = x;
       })},
      {"target.r_designed", Real([](ParseState& st, double x) {
         st.config.problem.target.r_designed = x;
       })},
      {"target.gamma_acc", Real([](ParseState& st, double x) {
         st.config.problem.target.gamma_acc = x;
       })},
      {"target.alpha", Real([](ParseState& st, double x) {
         st.config.problem.target.alpha = x;
       })},
      {"target.chi2", Real([](ParseState& st, double x) {
         st.config.problem.target.chi2 = x;
       })},
      {"target.n_params", Integer([](ParseState& st, long x) {
         st.config.problem.target.n_params = static_cast<int>(x);
       })},
      {"target.m_nominal", Real([](ParseState& st, double x) {
         st.config.problem.target.m_nominal = x;
       })},
      {"target.sigma_e2", Real([](ParseState& st, double x) {
         st.config.problem.target.sigma_e2 = x;
       })},
      {"target.sigma_e", Real([](ParseState& st, double x) {
         st.config.problem.target.sigma_e2 = x * x;
       })},
      {"solver.tol",
       Real([](ParseState& st, double x) { st.config.bnb.tol = x; })},
      {"solver.node_budget",
       Integer([](ParseState& st, long x) { st.config.bnb.node_budget = x; })},
      {"solver.max_n", Integer([](ParseState& st, long x) {
         st.config.bnb.max_n = static_cast<int>(x);
       })},
      {"solver.multistart", Integer([](ParseState& st, long x) {
         st.config.search.multistart = static_cast<int>(x);
       })},
      {"solver.seed", Integer([](ParseState& st, long x) {
         st.config.search.seed = static_cast<uint64_t>(x);
       })},
      {"solver.max_sweeps", Integer([](ParseState& st, long x) {
         st.config.search.max_sweeps = static_cast<int>(x);
       })},
      {"solver.optimize_levels", Flag([](ParseState& st, bool x) {
         st.config.search.optimize_levels = x;
       })},
      {"solver.slp_refine", Flag([](ParseState& st, bool x) {
         st.config.search.slp_refine = x;
       })},
      {"solver.slp_blocks", Integer([](ParseState& st, long x) {
         st.config.search.slp_blocks = static_cast<int>(x);
       })},
      {"sim.m_true",
       Real([](ParseState& st, double x) { st.config.sim.m_true = x; })},
      {"sim.delta_true",
       Real([](ParseState& st, double x) { st.config.sim.delta_true = x; })},
      {"sim.sigma_e",
       Real([](ParseState& st, double x) { st.config.sim.sigma_e = x; })},
      {"sim.sigma_a_meas", Real([](ParseState& st, double x) {
         st.config.sim.sigma_a_meas = x;
       })},
      {"sim.trials", Integer([](ParseState& st, long x) {
         st.config.sim.trials = static_cast<int>(x);
       })},
      {"sim.seed", Integer([](ParseState& st, long x) {
         st.config.sim.seed = static_cast<uint64_t>(x);
       })},
      {"analyze.gap_points", Integer([](ParseState& st, long x) {
         st.config.gap_points = static_cast<int>(x);
       })},
  };
  return *keys;
}

const char* const kSegmentFields[] = {"d_from",    "a_min",     "a_max",
                                      "v_min",     "v_max",     "v_min_kmh",
                                      "v_max_kmh"};

// bounds.segment.<i>.<field>
absl::StatusOr<bool> SetSegmentKey(ParseState& st, absl::string_view key,
                                   absl::string_view value) {
  constexpr absl::string_view kPrefix = "bounds.segment.";
  if (!absl::StartsWith(key, kPrefix)) return false;
  std::vector<absl::string_view> parts =
      absl::StrSplit(key.substr(kPrefix.size()), '.');
  if (parts.size() != 2) return false;
  int index = 0;
  if (!absl::SimpleAtoi(parts[0], &index) || index < 0) return false;
  const absl::string_view field = parts[1];
  const std::optional<double> x = ParseDouble(value);
  bool known = false;
  for (const char* f : kSegmentFields) known = known || field == f;
  if (!known) return false;
  if (!x.has_value()) return BadValue("a number", value);
  BoundSegment& seg = st.segments[index];
  if (field == "d_from") seg.d_from = *x;
  if (field == "a_min") seg.a_min = *x;
  if (field == "a_max") seg.a_max = *x;
  if (field == "v_min") seg.v_min = *x;
  if (field == "v_max") seg.v_max = *x;
  if (field == "v_min_kmh") seg.v_min = *x / kKmh;
  if (field == "v_max_kmh") seg.v_max = *x / kKmh;
  return true;
}

RunConfig DefaultConfig() {
  RunConfig c;
  c.problem.grid.ts = 0.1;
  c.problem.grid.n = 1;
  return c;
}

absl::Status Finish(ParseState& st) {
  RunConfig& c = st.config;
  for (auto& [index, seg] : st.segments) c.problem.bounds.varying.push_back(seg);
  std::stable_sort(c.problem.bounds.varying.begin(),
                   c.problem.bounds.varying.end(),
                   [](const BoundSegment& x, const BoundSegment& y) {
                     return x.d_from < y.d_from;
                   });
  if (!c.v0_set) c.problem.v0 = c.problem.bounds.v_min;
  QualityTarget& t = c.problem.target;
  if (t.r_designed == 0.0 && t.gamma_acc > 0.0) {
    if (t.chi2 == 0.0) t = WithChi2FromAlpha(t);
    t.r_designed = RDesignedFromAccuracy(t);
  }
  if (c.n_max < 0) return absl::InvalidArgumentError("design.n_max < 0");
  if (c.gap_points < 2) {
    return absl::InvalidArgumentError("analyze.gap_points must be >= 2");
  }
  if (absl::Status s = t.Validate(); !s.ok()) return s;
  return absl::OkStatus();
}

absl::Status LineError(int line, const absl::Status& s) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line, ": ", s.message()));
}

// Splits a CSV body into rows of numbers after checking the header.
absl::StatusOr<std::vector<std::vector<double>>> ParseCsv(
    absl::string_view text, absl::string_view header) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (absl::string_view& l : lines) {
    if (absl::EndsWith(l, "\r")) l.remove_suffix(1);
  }
  if (lines.empty() || absl::StripAsciiWhitespace(lines[0]) != header) {
    return absl::InvalidArgumentError(
        absl::StrCat("line 1: expected header '", header, "'"));
  }
  const size_t cols = std::vector<absl::string_view>(
                          absl::StrSplit(header, ',')).size();
  std::vector<std::vector<double>> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int line = static_cast<int>(i + 1);
    if (absl::StripAsciiWhitespace(lines[i]).empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line, ": blank line"));
    }
    std::vector<absl::string_view> fields = absl::StrSplit(lines[i], ',');
    if (fields.size() != cols) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line, ": expected ", cols, " fields, got ", fields.size()));
    }
    std::vector<double> row;
    for (size_t j = 0; j < cols; ++j) {
      const std::optional<double> x = ParseDouble(fields[j]);
      if (!x.has_value()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line, ": field ", j + 1, " is not a number: '",
            fields[j], "'"));
      }
      row.push_back(*x);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return absl::InvalidArgumentError("no data rows");
  return rows;
}

}  // namespace

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys = {"preset"};
  for (const auto& [k, v] : FixedKeys()) keys.push_back(k);
  for (const char* f : kSegmentFields) {
    keys.push_back(absl::StrCat("bounds.segment.<i>.", f));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::string> PresetNames() { return {"small-range", "large-range"}; }

absl::StatusOr<RunConfig> Preset(absl::string_view name) {
  RunConfig c = DefaultConfig();
  c.preset = std::string(name);
  DesignProblem& p = c.problem;
  p.objective = Objective::kMinTime;
  p.grid.ts = 0.01;
  p.actuator.pole = 0.979;
  p.bounds.a_max = 0.9;
  p.bounds.v_min = 4.0 / kKmh;
  p.target.r_designed = 600.0;
  c.n_max = 6000;
  if (name == "small-range") {
    p.bounds.a_min = -0.3;
    p.bounds.v_max = 12.0 / kKmh;
    c.extra_time_s = 7.0;
  } else if (name == "large-range") {
    p.bounds.a_min = -0.23;
    p.bounds.v_max = 23.0 / kKmh;
    c.extra_time_s = 6.0;
  } else {
    return absl::NotFoundError(absl::StrCat(
        "unknown preset '", name, "'; known: ",
        absl::StrJoin(PresetNames(), ", ")));
  }
  p.v0 = p.bounds.v_min;
  return c;
}

absl::StatusOr<RunConfig> ParseConfig(absl::string_view text) {
  ParseState st;
  st.config = DefaultConfig();
  std::set<std::string> seen;
  int line_no = 0;
  bool any_key = false;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = raw;
    if (const size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return LineError(line_no,
                       absl::InvalidArgumentError("expected 'key = value'"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value =
        absl::StripAsciiWhitespace(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      return LineError(line_no, absl::InvalidArgumentError(
                                    "expected 'key = value'"));
    }
    if (!seen.insert(key).second) {
      return LineError(line_no, absl::InvalidArgumentError(
                                    absl::StrCat("repeated key '", key, "'")));
    }
    if (key == "preset") {
      if (any_key) {
        return LineError(line_no, absl::InvalidArgumentError(
                                      "preset must be the first key"));
      }
      absl::StatusOr<RunConfig> base = Preset(value);
      if (!base.ok()) return LineError(line_no, base.status());
      st.config = *std::move(base);
      st.config.v0_set = false;
      any_key = true;
      continue;
    }
    any_key = true;
    const auto it = FixedKeys().find(key);
    if (it != FixedKeys().end()) {
      if (absl::Status s = it->second(st, value); !s.ok()) {
        return LineError(line_no,
                         absl::InvalidArgumentError(
                             absl::StrCat(key, ": ", s.message())));
      }
      continue;
    }
    absl::StatusOr<bool> seg = SetSegmentKey(st, key, value);
    if (!seg.ok()) {
      return LineError(line_no, absl::InvalidArgumentError(absl::StrCat(
                                    key, ": ", seg.status().message())));
    }
    if (!*seg) {
      return LineError(line_no, absl::InvalidArgumentError(
                                    absl::StrCat("unknown key '", key, "'")));
    }
  }
  if (absl::Status s = Finish(st); !s.ok()) return s;
  return st.config;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out << contents;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> LoadConfig(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<RunConfig> c = ParseConfig(*text);
  if (!c.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", c.status().message()));
  }
  return c;
}

absl::StatusOr<DriveLog> ParseDriveLog(absl::string_view text) {
  absl::StatusOr<std::vector<std::vector<double>>> rows =
      ParseCsv(text, "t,a_meas,f_res");
  if (!rows.ok()) return rows.status();
  const Eigen::Index n = static_cast<Eigen::Index>(rows->size());
  DriveLog log;
  log.t.resize(n);
  log.a_meas.resize(n);
  log.f_res.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    log.t(k) = (*rows)[k][0];
    log.a_meas(k) = (*rows)[k][1];
    log.f_res(k) = (*rows)[k][2];
  }
  if (absl::Status s = log.Validate(); !s.ok()) return s;
  return log;
}

std::string FormatDriveLog(const DriveLog& log) {
  std::string out = "t,a_meas,f_res\n";
  for (Eigen::Index k = 0; k < log.t.size(); ++k) {
    absl::StrAppend(&out, Num(log.t(k)), ",", Num(log.a_meas(k)), ",",
                    Num(log.f_res(k)), "\n");
  }
  return out;
}

absl::StatusOr<Profile> ParseProfile(absl::string_view text) {
  absl::StatusOr<std::vector<std::vector<double>>> rows =
      ParseCsv(text, "k,t,u,a,v,d");
  if (!rows.ok()) return rows.status();
  const int n = static_cast<int>(rows->size());
  Profile p;
  p.u.resize(n);
  p.a.resize(n);
  p.v.resize(n);
  p.d.resize(n);
  for (int k = 0; k < n; ++k) {
    const std::vector<double>& r = (*rows)[k];
    if (r[0] != k + 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", k + 2, ": expected k = ", k + 1, ", got ", Num(r[0])));
    }
    p.u(k) = r[2];
    p.a(k) = r[3];
    p.v(k) = r[4];
    p.d(k) = r[5];
  }
  const double ts = (*rows)[0][1];
  for (int k = 0; k < n; ++k) {
    const double t = (*rows)[k][1];
    if (std::abs(t - (k + 1) * ts) > 1e-9 * std::max(1.0, std::abs(t))) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", k + 2, ": t must equal k ts with ts = ", Num(ts)));
    }
  }
  absl::StatusOr<SamplingGrid> grid = SamplingGrid::Create(ts, n);
  if (!grid.ok()) return grid.status();
  p.grid = *grid;
  p.v0 = p.v(0) - ts * p.a(0);
  return p;
}

std::string FormatProfile(const Profile& profile) {
  std::string out = "k,t,u,a,v,d\n";
  const double ts = profile.grid.ts;
  for (Eigen::Index k = 0; k < profile.a.size(); ++k) {
    absl::StrAppend(&out, k + 1, ",", Num((k + 1) * ts), ",",
                    Num(profile.u(k)), ",", Num(profile.a(k)), ",",
                    Num(profile.v(k)), ",", Num(profile.d(k)), "\n");
  }
  return out;
}

std::string SolveReportToJson(const SolveReport& r) {
  Json j;
  j["status"] = ToString(r.status);
  j["objective_value"] = JsonNum(r.objective_value);
  j["lower_bound"] = JsonNum(r.lower_bound);
  j["upper_bound"] = JsonNum(r.upper_bound);
  j["gap"] = JsonNum(r.gap);
  j["nodes_explored"] = r.nodes_explored;
  j["certified"] = r.certified;
  j["verified"] = r.verified;
  j["excitation_bound"] =
      r.excitation_bound.has_value() ? JsonNum(*r.excitation_bound)
                                     : Json(nullptr);
  j["message"] = r.message;
  j["u_star"] = JsonVec(r.u_star);
  return j.dump(2) + "\n";
}

absl::StatusOr<SolveReport> SolveReportFromJson(absl::string_view text) {
  const Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("solve report is not a JSON object");
  }
  SolveReport r;
  try {
    const std::string status = j.at("status").get<std::string>();
    bool found = false;
    for (SolveStatus s :
         {SolveStatus::kOptimal, SolveStatus::kGapReached,
          SolveStatus::kInfeasible, SolveStatus::kBudgetExhausted}) {
      if (status == ToString(s)) {
        r.status = s;
        found = true;
      }
    }
    if (!found) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown status '", status, "'"));
    }
    r.objective_value = FromJsonNum(j.at("objective_value"));
    r.lower_bound = FromJsonNum(j.at("lower_bound"));
    r.upper_bound = FromJsonNum(j.at("upper_bound"));
    r.gap = FromJsonNum(j.at("gap"));
    r.nodes_explored = j.at("nodes_explored").get<long>();
    r.certified = j.at("certified").get<bool>();
    r.verified = j.at("verified").get<bool>();
    if (!j.at("excitation_bound").is_null()) {
      r.excitation_bound = j.at("excitation_bound").get<double>();
    }
    r.message = j.at("message").get<std::string>();
    const Json& u = j.at("u_star");
    r.u_star.resize(static_cast<Eigen::Index>(u.size()));
    for (size_t i = 0; i < u.size(); ++i) r.u_star(i) = FromJsonNum(u[i]);
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed solve report: ", e.what()));
  }
  return r;
}

std::string MassEstimateToJson(const MassEstimate& e,
                               const std::optional<QualityTarget>& target) {
  Json j;
  j["m_hat"] = JsonNum(e.m_hat);
  j["delta_hat"] =
      e.delta_hat.has_value() ? JsonNum(*e.delta_hat) : Json(nullptr);
  j["theta_hat"] = JsonVec(e.theta_hat);
  Json cov = Json::array();
  for (Eigen::Index i = 0; i < e.theta_cov.rows(); ++i) {
    cov.push_back(JsonVec(e.theta_cov.row(i).transpose()));
  }
  j["theta_cov"] = cov;
  j["sigma_e2_hat"] = JsonNum(e.sigma_e2_hat);
  const double r_final =
      e.r_trace.size() > 0 ? e.r_trace(e.r_trace.size() - 1) : 0.0;
  j["r_final"] = JsonNum(r_final);
  j["samples"] = e.r_trace.size();
  if (target.has_value() && target->r_designed > 0.0 &&
      target->m_nominal > 0.0 && target->chi2 > 0.0) {
    // Designed band, and the same band with the estimated noise level.
    QualityTarget t = *target;
    j["designed_relative_error"] = JsonNum(DesignedRelativeError(t));
    if (std::isfinite(e.sigma_e2_hat) && r_final > 0.0) {
      t.sigma_e2 = e.sigma_e2_hat;
      t.r_designed = r_final;
      j["estimated_relative_error"] = JsonNum(DesignedRelativeError(t));
    }
    j["r_designed_reached"] = r_final >= target->r_designed;
  }
  return j.dump(2) + "\n";
}

std::string CoverageReportToJson(const CoverageReport& r) {
  Json j;
  j["trials"] = r.m_hat.size();
  j["designed_relative_error"] = JsonNum(r.designed_relative_error);
  j["within"] = r.within;
  j["fraction"] = JsonNum(r.fraction);
  j["standard_error"] = JsonNum(r.standard_error);
  j["fraction_per_trial"] = JsonNum(r.fraction_per_trial);
  j["fraction_pooled"] = JsonNum(r.fraction_pooled);
  j["pooled_sigma_e2"] = JsonNum(r.pooled_sigma_e2);
  j["reached"] = r.reached;
  j["mean_time_to_r"] = JsonNum(r.mean_time_to_r);
  j["mean_distance_to_r"] = JsonNum(r.mean_distance_to_r);
  Json m = Json::array();
  for (double x : r.m_hat) m.push_back(JsonNum(x));
  j["m_hat"] = m;
  Json s = Json::array();
  for (double x : r.sigma_e2_hat) s.push_back(JsonNum(x));
  j["sigma_e2_hat"] = s;
  return j.dump(2) + "\n";
}

std::string FormatLiftedTriplets(const LiftedProblem& lifted) {
  const int n = lifted.n;
  // Column of U(i, j), i <= j, 0-based.
  auto u_col = [n](int i, int j) { return i * n - i * (i - 1) / 2 + (j - i); };
  const int u_start = n * (n + 1) / 2;
  const int one = u_start + n;
  std::string out;
  absl::StrAppend(&out,
                  "# lifted design problem: row 0 is the objective, rows >= 1 "
                  "are constraints <= 0\n"
                  "# columns: U(i,j) for i <= j row by row, then u(1..n), "
                  "then the constant 1\n"
                  "# side conditions: [[U, u], [u^T, 1]] positive "
                  "semidefinite and rank one\n");
  absl::StrAppend(&out, "n ", n, "\n");
  absl::StrAppend(&out, "variables ", lifted.NumVariables(), "\n");
  absl::StrAppend(&out, "rows ", lifted.rows.size(), "\n");
  for (size_t r = 0; r < lifted.rows.size(); ++r) {
    absl::StrAppend(&out, "label ", r + 1, " ", lifted.rows[r].label, "\n");
  }
  auto emit = [&](size_t row, const Eigen::MatrixXd& q,
                  const Eigen::VectorXd& lin, double constant) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = i == j ? q(i, i) : q(i, j) + q(j, i);
        if (v != 0.0) {
          absl::StrAppend(&out, row, " ", u_col(i, j), " ", Num(v), "\n");
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (lin(i) != 0.0) {
        absl::StrAppend(&out, row, " ", u_start + i, " ", Num(lin(i)), "\n");
      }
    }
    if (constant != 0.0) {
      absl::StrAppend(&out, row, " ", one, " ", Num(constant), "\n");
    }
  };
  emit(0, lifted.cost_q, lifted.cost_linear, 0.0);
  for (size_t r = 0; r < lifted.rows.size(); ++r) {
    const LiftedRow& row = lifted.rows[r];
    emit(r + 1, row.q, row.linear, row.constant);
  }
  return out;
}

}  // namespace vmass
