// Copyright 2026 The sbhm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON configs and CSV/JSON reports. Schema: docs/config.md.

#ifndef SBHM_IO_HPP
#define SBHM_IO_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbhm/dynamics.hpp"
#include "sbhm/errors.hpp"
#include "sbhm/experiments.hpp"
#include "sbhm/potentials.hpp"
#include "sbhm/spectrum.hpp"

namespace sbhm {

using Json = nlohmann::json;

namespace detail {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("config: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

// Finite doubles print with 17 significant digits; NaN as null.
inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace detail

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline ObjectiveSpec parse_objective(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: 'objective' must be an object");
  ObjectiveSpec spec;
  spec.kind = parse_objective_kind(detail::get_required<std::string>(j, "kind"));
  spec.lambda = detail::get_required<std::vector<double>>(j, "lambda");
  detail::validate_lambda(to_vector(spec.lambda), "objective");
  return spec;
}

inline Json to_json(const ObjectiveSpec& s) {
  return {{"kind", std::string(to_string(s.kind))}, {"lambda", s.lambda}};
}

inline IntegratorConfig parse_integrator(const Json& j) {
  IntegratorConfig c;
  if (j.is_null()) return c;
  c.step = detail::get_or(j, "step", c.step);
  c.max_steps = detail::get_or<std::uint64_t>(j, "max_steps", c.max_steps);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
  c.record_stride = detail::get_or<std::uint64_t>(j, "record_stride", c.record_stride);
  if (j.contains("scheme")) c.scheme = parse_scheme(detail::get_required<std::string>(j, "scheme"));
  c.validate();
  return c;
}

inline ExperimentSpec parse_experiment(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  ExperimentSpec s;
  s.objective = parse_objective(detail::get_required<Json>(j, "objective"));
  s.sweep_kind = parse_sweep_kind(detail::get_required<std::string>(j, "sweep_kind"));
  s.alpha = detail::get_or(j, "alpha", s.alpha);
  s.epsilon = detail::get_or(j, "epsilon", s.epsilon);
  s.epsilon_grid = detail::get_or(j, "epsilon_grid", s.epsilon_grid);
  s.s_grid = detail::get_or(j, "s_grid", s.s_grid);
  s.alpha_grid = detail::get_or(j, "alpha_grid", s.alpha_grid);
  s.gamma1_grid = detail::get_or(j, "gamma1_grid", s.gamma1_grid);
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    s.sigma2 = detail::get_or(n, "sigma2", s.sigma2);
    if (n.contains("sigma1") && !n.at("sigma1").is_null())
      s.sigma1 = detail::get_required<double>(n, "sigma1");
  }
  if (j.contains("initial")) {
    const Json& in = j.at("initial");
    s.initial.center = detail::get_or(in, "center", s.initial.center);
    s.initial.velocity = detail::get_or(in, "velocity", s.initial.velocity);
    s.initial.jitter_radius = detail::get_or(in, "jitter_radius", s.initial.jitter_radius);
  }
  s.threshold_C = detail::get_or(j, "threshold_C", s.threshold_C);
  s.trials = detail::get_or<std::uint64_t>(j, "trials", s.trials);
  s.master_seed = detail::get_or<std::uint64_t>(j, "master_seed", s.master_seed);
  if (j.contains("integrator")) s.integrator = parse_integrator(j.at("integrator"));
  s.k = detail::get_or(j, "k", s.k);
  s.minimizer_start = detail::get_or(j, "minimizer_start", s.minimizer_start);
  s.validate();
  return s;
}

/// Configuration of a single `simulate` run.
struct SimulationConfig {
  ObjectiveSpec objective;
  double alpha = 1.0;
  double epsilon = 0.01;
  double sigma2 = 1.0;
  std::optional<double> sigma1;
  std::vector<double> x0;  // empty: origin
  std::vector<double> v0;  // empty: zero
  IntegratorConfig integrator;
  std::optional<double> stop_f_below;  // stop once f(X) < this value
  std::size_t csv_stride = 1;
};

inline SimulationConfig parse_simulation(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  SimulationConfig c;
  c.objective = parse_objective(detail::get_required<Json>(j, "objective"));
  c.alpha = detail::get_or(j, "alpha", c.alpha);
  c.epsilon = detail::get_or(j, "epsilon", c.epsilon);
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    c.sigma2 = detail::get_or(n, "sigma2", c.sigma2);
    if (n.contains("sigma1") && !n.at("sigma1").is_null())
      c.sigma1 = detail::get_required<double>(n, "sigma1");
  }
  c.x0 = detail::get_or(j, "x0", c.x0);
  c.v0 = detail::get_or(j, "v0", c.v0);
  if (j.contains("integrator")) c.integrator = parse_integrator(j.at("integrator"));
  if (j.contains("stop_f_below") && !j.at("stop_f_below").is_null())
    c.stop_f_below = detail::get_required<double>(j, "stop_f_below");
  c.csv_stride = detail::get_or<std::size_t>(j, "csv_stride", c.csv_stride);
  const auto d = c.objective.lambda.size();
  detail::require(c.x0.empty() || c.x0.size() == d, "simulate: x0 has the wrong dimension");
  detail::require(c.v0.empty() || c.v0.size() == d, "simulate: v0 has the wrong dimension");
  detail::require(c.csv_stride >= 1, "simulate: csv_stride must be >= 1");
  DynamicsParams::isotropic(static_cast<int>(d), c.alpha, c.epsilon, c.sigma2, c.sigma1)
      .validate(static_cast<int>(d));
  return c;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const RegressionResult& r) {
  return {{"slope", detail::number(r.slope)},
          {"intercept", detail::number(r.intercept)},
          {"stderr_slope", detail::number(r.stderr_slope)},
          {"r2", detail::number(r.r2)},
          {"n_points", r.n_points}};
}

inline Json to_json(const TheoryReport& t) {
  Json pts = Json::array();
  for (const auto& p : t.points)
    pts.push_back({{"epsilon", p.epsilon},
                   {"ratio", detail::number(p.ratio)},
                   {"ratio_ci95_lo", detail::number(p.ratio_lo)},
                   {"ratio_ci95_hi", detail::number(p.ratio_hi)}});
  return {{"k", t.k},
          {"gamma1", t.gamma1},
          {"alpha", t.alpha},
          {"predicted_rate", t.predicted_rate},
          {"points", pts},
          {"bounded", t.bounded},
          {"trend_slope", detail::number(t.trend_slope)}};
}

inline Json spectrum_to_json(const SaddleSpectrum& s, int k_override = 0) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks)
    blocks.push_back({{"case", std::string(to_string(b.tag))},
                      {"lambda", b.lambda},
                      {"mu_plus", {b.mu_plus.real(), b.mu_plus.imag()}},
                      {"mu_minus", {b.mu_minus.real(), b.mu_minus.imag()}}});
  const double gamma1 = -s.blocks.front().lambda;
  const int k = k_override > 0 ? k_override : s.k;
  Json j = {{"d", s.d},
            {"alpha", s.alpha},
            {"blocks", blocks},
            {"k", s.k},
            {"mu0", s.mu0},
            {"gamma1", gamma1},
            {"basis_condition", detail::number(s.basis_condition)}};
  if (s.alpha > 0.0) j["predicted_exit_rate"] = predicted_exit_rate(k, gamma1, s.alpha);
  return j;
}

/// Per-trial CSV: sweep_param,value,trial,seed,T_x,censored,steps. T_x is
/// empty for censored trials.
inline void write_trials_csv(std::ostream& os, const SweepResult& r) {
  const auto prec = os.precision(17);
  os << "sweep_param,value,trial,seed,T_x,censored,steps\n";
  for (const auto& p : r.points)
    for (const auto& rec : p.records) {
      os << r.sweep_param << ',' << p.point.value << ',' << rec.trial << ',' << rec.seed << ',';
      if (rec.T_x) os << *rec.T_x;
      os << ',' << (rec.censored() ? 1 : 0) << ',' << rec.steps << '\n';
    }
  os.precision(prec);
}

inline void write_summary_csv(std::ostream& os, const SweepResult& r) {
  const auto prec = os.precision(17);
  os << "sweep_param,value,epsilon,alpha,gamma1,f_star,trials,hits,censored,"
        "mean_T,median_T,ci95_lo,ci95_hi,flagged\n";
  for (const auto& p : r.points) {
    const auto& s = p.summary;
    os << r.sweep_param << ',' << p.point.value << ',' << p.point.epsilon << ','
       << p.point.alpha << ',' << p.point.gamma1 << ',' << p.minimum.value << ',' << s.trials
       << ',' << s.hits << ',' << s.censored << ',' << s.mean_T << ',' << s.median_T << ','
       << s.ci95_lo << ',' << s.ci95_hi << ',' << (s.flagged ? 1 : 0) << '\n';
  }
  os.precision(prec);
}

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a truncated file.
inline void write_atomically(const std::filesystem::path& path,
                             const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    body(out);
    out.flush();
    if (!out) throw NumericalError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// CSV reading for `fit`

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw InvalidArgument("csv: empty input");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) throw InvalidArgument("csv: ragged row '" + line + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InvalidArgument("csv: bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("csv: bad number '" + s + "'");
  }
}

/// (sweep value, median T_x) pairs from either a summary CSV (median_T
/// column) or a per-trial CSV (medians of uncensored T_x per value).
inline std::pair<std::vector<double>, std::vector<double>> medians_from_csv(const CsvTable& t) {
  const int vcol = t.column("value");
  if (vcol < 0) throw InvalidArgument("csv: missing 'value' column");
  std::vector<double> xs, ys;
  if (const int mcol = t.column("median_T"); mcol >= 0) {
    for (const auto& r : t.rows) {
      if (r[mcol].empty()) continue;
      const double m = parse_double(r[mcol]);
      if (!std::isfinite(m)) continue;  // grid point without hits
      xs.push_back(parse_double(r[vcol]));
      ys.push_back(m);
    }
    return {xs, ys};
  }
  const int tcol = t.column("T_x");
  if (tcol < 0) throw InvalidArgument("csv: need a 'median_T' or 'T_x' column");
  std::map<double, std::vector<double>> groups;
  for (const auto& r : t.rows) {
    if (r[tcol].empty()) continue;
    groups[parse_double(r[vcol])].push_back(parse_double(r[tcol]));
  }
  for (auto& [v, ts] : groups) {
    xs.push_back(v);
    ys.push_back(median(ts));
  }
  return {xs, ys};
}

}  // namespace sbhm

#endif  // SBHM_IO_HPP
