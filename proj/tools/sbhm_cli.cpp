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

// sbhm: command-line front end.
//
//   sbhm predict  --k 1 --gamma1 18 --alpha 1
//   sbhm spectrum --kind cubic_reg_quadratic --lambda 9 ... --alpha 1
//   sbhm simulate --config sim.json [--seed N] [--out traj.csv]
//   sbhm sweep    --config sweep.json --out-dir results [--seed N] [--threads N]
//   sbhm fit      --csv results/summary.csv
//
// Exit codes: 0 ok, 1 usage, 2 invalid configuration, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sbhm/io.hpp"
#include "sbhm/sbhm.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;

void print_json(const sbhm::Json& j) { std::cout << j.dump(2) << '\n'; }

int run_predict(int k, double gamma1, double alpha) {
  print_json({{"k", k},
              {"gamma1", gamma1},
              {"alpha", alpha},
              {"rate", sbhm::predicted_exit_rate(k, gamma1, alpha)}});
  return 0;
}

int run_spectrum(const std::string& kind, const std::vector<double>& lambda, double alpha,
                 const std::vector<double>& at, int k_override) {
  const sbhm::ObjectiveSpec spec{sbhm::parse_objective_kind(kind), lambda};
  const auto f = sbhm::make_objective(spec);
  const sbhm::Vector x0 = at.empty() ? sbhm::Vector::Zero(f.dim()) : sbhm::to_vector(at);
  // Validates that x0 is critical before the eigen-analysis.
  const auto jac = sbhm::jacobi_matrix(f, x0, sbhm::FrictionParams{alpha});
  const auto s = sbhm::saddle_eigensystem(f.hessian(x0), alpha);
  auto j = sbhm::spectrum_to_json(s, k_override);
  j["objective"] = sbhm::to_json(spec);
  j["block_residual"] = sbhm::block_residual(s, jac.entries);
  print_json(j);
  return 0;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_path) {
  const auto cfg = sbhm::parse_simulation(sbhm::read_json_file(config_path));
  const auto f = sbhm::make_objective(cfg.objective);
  const int d = f.dim();
  auto params = sbhm::DynamicsParams::isotropic(d, cfg.alpha, cfg.epsilon, cfg.sigma2, cfg.sigma1);
  auto integ = cfg.integrator;
  if (seed) integ.seed = *seed;
  sbhm::PhasePoint p0(cfg.x0.empty() ? sbhm::Vector::Zero(d) : sbhm::to_vector(cfg.x0),
                      cfg.v0.empty() ? sbhm::Vector::Zero(d) : sbhm::to_vector(cfg.v0));
  const auto stop = [&](double, const sbhm::PhasePoint& s) {
    return cfg.stop_f_below && f.value(s.x) < *cfg.stop_f_below;
  };
  const auto traj = sbhm::simulate(f, p0, params, integ, stop);
  if (out_path.empty()) {
    sbhm::write_trajectory_csv(std::cout, traj, cfg.csv_stride);
    return 0;
  }
  sbhm::write_atomically(out_path, [&](std::ostream& os) {
    sbhm::write_trajectory_csv(os, traj, cfg.csv_stride);
  });
  print_json({{"scheme", std::string(sbhm::to_string(integ.scheme))},
              {"seed", integ.seed},
              {"steps", traj.steps},
              {"terminated_by", traj.terminated_by == sbhm::Termination::StoppingCondition
                                    ? "StoppingCondition"
                                    : "MaxSteps"},
              {"final_f", f.value(traj.states.back().x)},
              {"samples", traj.states.size()},
              {"out", out_path}});
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<std::uint64_t> trials,
              unsigned threads) {
  auto spec = sbhm::parse_experiment(sbhm::read_json_file(config_path));
  if (seed) spec.master_seed = *seed;
  if (trials) spec.trials = *trials;
  spec.validate();

  const auto result = sbhm::run_sweep(spec, threads);

  sbhm::Json report = {{"sweep_kind", std::string(sbhm::to_string(spec.sweep_kind))},
                       {"sweep_param", result.sweep_param},
                       {"master_seed", spec.master_seed},
                       {"trials", spec.trials},
                       {"threshold_C", spec.threshold_C}};
  std::size_t usable = 0;
  for (const auto& p : result.points) usable += std::isfinite(p.summary.median_T) ? 1 : 0;
  if (usable >= 3) {
    report["fit_median"] = sbhm::to_json(sbhm::fit_sweep(result, true));
    report["fit_mean"] = sbhm::to_json(sbhm::fit_sweep(result, false));
  }
  if (spec.sweep_kind == sbhm::SweepKind::StepsizeSweep)
    report["theory"] = sbhm::to_json(sbhm::compare_to_theory(spec, result));
  sbhm::Json flagged = sbhm::Json::array();
  for (const auto& p : result.points)
    if (p.summary.flagged) flagged.push_back(p.point.value);
  report["flagged_values"] = flagged;

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  sbhm::write_atomically(dir / "trials.csv",
                         [&](std::ostream& os) { sbhm::write_trials_csv(os, result); });
  sbhm::write_atomically(dir / "summary.csv",
                         [&](std::ostream& os) { sbhm::write_summary_csv(os, result); });
  sbhm::write_atomically(dir / "fit.json",
                         [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  print_json(report);
  return 0;
}

int run_fit(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw sbhm::InvalidArgument("cannot open csv file '" + csv_path + "'");
  const auto table = sbhm::read_csv(in);
  const auto [xs, ys] = sbhm::medians_from_csv(table);
  auto j = sbhm::to_json(sbhm::loglog_fit(xs, ys));
  j["csv"] = csv_path;
  print_json(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic heavy-ball saddle escape: simulation, spectra, sweeps"};
  app.require_subcommand(1, 1);
  std::cout.precision(17);

  int k = 1;
  double gamma1 = 0, alpha = 1.0;
  auto* predict = app.add_subcommand("predict", "Predicted exit-rate constant as JSON");
  predict->add_option("--k", k, "Number of saddles crossed")->required();
  predict->add_option("--gamma1", gamma1, "Saddle curvature bound gamma1")->required();
  predict->add_option("--alpha", alpha, "Friction")->required();

  std::string kind = "quadratic";
  std::vector<double> lambda, at;
  int k_override = 0;
  auto* spectrum = app.add_subcommand("spectrum", "Saddle eigen-structure of the Jacobi matrix");
  spectrum->add_option("--kind", kind, "quadratic or cubic_reg_quadratic");
  spectrum->add_option("--lambda", lambda, "Diagonal entries of Lambda")->required();
  spectrum->add_option("--alpha", alpha, "Friction")->required();
  spectrum->add_option("--at", at, "Critical point (default: origin)");
  spectrum->add_option("--k", k_override, "Saddle count for the rate prediction (default: index)");

  std::string config, out, out_dir, csv;
  std::optional<std::uint64_t> seed, trials;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  auto* simulate = app.add_subcommand("simulate", "Simulate one trajectory, CSV output");
  simulate->add_option("--config", config, "Simulation config (JSON)")->required();
  simulate->add_option("--seed", seed, "Override the integrator seed");
  simulate->add_option("--out", out, "Output CSV (default: standard output)");

  auto* sweep = app.add_subcommand("sweep", "Run a hitting-time sweep");
  sweep->add_option("--config", config, "Experiment config (JSON)")->required();
  sweep->add_option("--out-dir", out_dir, "Output directory")->required();
  sweep->add_option("--seed", seed, "Override master_seed");
  sweep->add_option("--trials", trials, "Override trials per grid point");
  sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* fit = app.add_subcommand("fit", "Log-log fit of median hitting time against sweep value");
  fit->add_option("--csv", csv, "Summary or per-trial CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*predict) return run_predict(k, gamma1, alpha);
    if (*spectrum) return run_spectrum(kind, lambda, alpha, at, k_override);
    if (*simulate) return run_simulate(config, seed, out);
    if (*sweep) return run_sweep(config, out_dir, seed, trials, threads);
    if (*fit) return run_fit(csv);
  } catch (const sbhm::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const sbhm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kUsage;
}
