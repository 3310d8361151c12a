// Copyright 2026 The Prognosticator Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line front end: run, sweep, weights, check-grad, check-estimators.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prognosticator/agents.h"
#include "prognosticator/basis.h"
#include "prognosticator/checks.h"
#include "prognosticator/config.h"
#include "prognosticator/errors.h"
#include "prognosticator/harness.h"

namespace {

using namespace prognosticator;

constexpr double kGradientTolerance = 1e-4;

struct ExperimentFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> env;
  std::optional<int> speed;
  std::vector<std::string> agents;
  std::optional<long> seed;
  std::optional<int> seeds;
  std::optional<int> episodes;
  std::optional<std::string> output;
  std::optional<int> threads;
};

void AddExperimentFlags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--config", f.config_path, "key = value config file");
  app->add_option("--set", f.overrides, "extra key=value setting")
      ->take_all();
  app->add_option("--env", f.env, "recommender or goal_reacher");
  app->add_option("--speed", f.speed, "single speed of non-stationarity");
  app->add_option("--agent", f.agents,
                  "pro_ols, pro_wls, onpg, ftrl_pg (repeatable)");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--seeds", f.seeds, "number of seeds");
  app->add_option("--episodes", f.episodes, "episodes per trial");
  app->add_option("--output", f.output, "output directory");
  app->add_option("--threads", f.threads, "worker threads, 0 = all cores");
}

ExperimentConfig BuildConfig(const ExperimentFlags& f) {
  KeyValueConfig values;
  if (!f.config_path.empty()) values = KeyValueConfig::Load(f.config_path);
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    }
    const KeyValueConfig one = KeyValueConfig::ParseString(kv);
    for (const auto& [key, value] : one.values()) values.Set(key, value);
  }
  if (f.env) values.Set("env.name", *f.env);
  if (f.speed) {
    values.Erase("env.speed");
    values.Set("experiment.speeds", std::to_string(*f.speed));
  }
  if (!f.agents.empty()) {
    std::string list;
    for (const std::string& a : f.agents) list += (list.empty() ? "" : ",") + a;
    values.Set("experiment.agents", list);
  }
  if (f.seed) values.Set("experiment.base_seed", std::to_string(*f.seed));
  if (f.seeds) values.Set("experiment.seeds", std::to_string(*f.seeds));
  if (f.episodes) values.Set("experiment.episodes", std::to_string(*f.episodes));
  if (f.output) values.Set("experiment.output_dir", *f.output);
  if (f.threads) values.Set("experiment.threads", std::to_string(*f.threads));
  return ParseExperimentConfig(values);
}

void PrintRegret(const RegretTable& table) {
  std::printf("%-8s %5s %12s %12s  %s\n", "agent", "speed", "regret", "se",
              "metric");
  for (const RegretRow& r : table.rows) {
    std::printf("%-8s %5d %12.6f %12.6f  %s\n",
                std::string(AgentKindName(r.agent)).c_str(), r.speed, r.mean,
                r.standard_error,
                std::string(RegretMetricName(r.metric)).c_str());
  }
}

int RunCommand(const ExperimentFlags& f) {
  const ExperimentConfig config = BuildConfig(f);
  const ExperimentResult result = RunAndWriteExperiment(config);
  PrintRegret(result.regret);
  std::printf("wrote %s/{episodes.csv,regret.csv,meta.txt}\n",
              config.output_dir.c_str());
  return 0;
}

int SweepCommand(const ExperimentFlags& f) {
  const ExperimentConfig config = BuildConfig(f);
  const std::size_t points = config.sweep.size();
  std::printf("sweeping %zu grid points\n", points);
  RunSweep(config);
  std::printf("wrote %s/sweep.csv\n", config.output_dir.c_str());
  return 0;
}

struct WeightFlags {
  std::vector<std::string> bases{"fourier"};
  std::vector<int> dims{5};
  long k = 99;
  int delta = 1;
  double alpha = 0.95;
  bool table = false;
  std::string output;
};

int WeightsCommand(const WeightFlags& f) {
  if (f.dims.size() != 1 && f.dims.size() != f.bases.size()) {
    throw ConfigError("give one --d or one per --basis");
  }
  std::vector<TimeBasisConfig> bases;
  for (std::size_t i = 0; i < f.bases.size(); ++i) {
    const int d = f.dims.size() == 1 ? f.dims[0] : f.dims[i];
    bases.emplace_back(ParseBasisFamily(f.bases[i]), d);
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!f.output.empty()) {
    file.open(f.output);
    if (!file) throw IoError("cannot write '" + f.output + "'");
    out = &file;
  }
  if (f.table || bases.size() > 1) {
    EmitWeightTable(f.k, f.delta, bases, *out, f.alpha);
  } else {
    const Vector zeta = ForecastWeights(f.k, f.delta, bases.front());
    *out << "episode_index,weight\n";
    out->precision(17);
    for (long i = 0; i < f.k; ++i) *out << (i + 1) << ',' << zeta(i) << '\n';
  }
  out->flush();
  if (!*out) throw IoError("error writing weight table");
  return 0;
}

int CheckGradCommand(std::uint64_t seed, int instances, double epsilon) {
  GradientSuiteOptions options;
  options.seed = seed;
  options.instances = instances;
  options.epsilon = epsilon;
  bool ok = true;
  std::printf("%-10s %9s %14s %8s %8s\n", "objective", "instances",
              "max_rel_error", "checked", "skipped");
  for (const GradientCheckSummary& s : RunGradientSuite(options)) {
    const bool pass = s.max_relative_error < kGradientTolerance;
    ok = ok && pass;
    std::printf("%-10s %9d %14.3e %8d %8d  %s\n", s.objective.c_str(),
                s.instances, s.max_relative_error, s.checked, s.skipped,
                pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

int CheckEstimatorsCommand(const EstimatorSuiteOptions& options) {
  const EstimatorSuiteResult r = RunEstimatorSuite(options);
  bool ok = true;
  const bool unbiased = r.nis_unbiased.z < 3.0;
  ok = ok && unbiased;
  std::printf("J(pi) = %.6f\n", r.true_value);
  std::printf("nis unbiased: mean %.6f se %.6f z %.2f  %s\n",
              r.nis_unbiased.mean, r.nis_unbiased.standard_error,
              r.nis_unbiased.z, unbiased ? "ok" : "FAIL");
  for (const ConsistencyResult& c : r.consistency) {
    const bool pass = c.large_error < c.small_error;
    ok = ok && pass;
    std::printf("%s consistency: mean |error| %.6f (N=%d) -> %.6f (N=%d)  %s\n",
                c.estimator.c_str(), c.small_error, options.small_episodes,
                c.large_error, options.large_episodes, pass ? "ok" : "FAIL");
  }
  for (const BiasPoint& p : r.nwis_bias) {
    std::printf("nwis constant basis n=%d: mean %.6f se %.6f z %.2f\n",
                p.episodes, p.mean, p.standard_error, p.z);
  }
  if (!r.nwis_bias.empty()) {
    const bool biased = r.nwis_bias.front().z > 3.0;
    const bool shrinks = std::abs(r.nwis_bias.back().mean - r.true_value) <
                         std::abs(r.nwis_bias.front().mean - r.true_value);
    ok = ok && biased && shrinks;
    std::printf("nwis small-sample bias %s, shrinking %s\n",
                biased ? "ok" : "FAIL", shrinks ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy optimization for non-stationary MDPs by forecasting "
               "future performance"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run agents and write results");
  AddExperimentFlags(run, run_flags);

  ExperimentFlags sweep_flags;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run a hyperparameter grid (sweep.* keys)");
  AddExperimentFlags(sweep, sweep_flags);

  WeightFlags weight_flags;
  CLI::App* weights =
      app.add_subcommand("weights", "print forecast weights as CSV");
  weights->add_option("--basis", weight_flags.bases, "basis family")
      ->capture_default_str();
  weights->add_option("--d", weight_flags.dims, "basis dimension")
      ->capture_default_str();
  weights->add_option("--k", weight_flags.k, "episodes so far")
      ->capture_default_str();
  weights->add_option("--delta", weight_flags.delta, "forecast horizon")
      ->capture_default_str();
  weights->add_option("--alpha", weight_flags.alpha,
                      "decay of the exponential reference column")
      ->capture_default_str();
  weights->add_flag("--table", weight_flags.table,
                    "wide table with an exponential-decay reference");
  weights->add_option("--output", weight_flags.output, "file instead of stdout");

  std::uint64_t grad_seed = 0;
  int grad_instances = 50;
  double grad_epsilon = 1e-5;
  CLI::App* check_grad =
      app.add_subcommand("check-grad", "finite-difference gradient suite");
  check_grad->add_option("--seed", grad_seed)->capture_default_str();
  check_grad->add_option("--instances", grad_instances)->capture_default_str();
  check_grad->add_option("--epsilon", grad_epsilon)->capture_default_str();

  EstimatorSuiteOptions est;
  CLI::App* check_est = app.add_subcommand(
      "check-estimators", "Monte Carlo checks of the NIS/NWIS estimators");
  check_est->add_option("--seed", est.seed)->capture_default_str();
  check_est->add_option("--runs", est.unbiased_runs, "unbiasedness runs")
      ->capture_default_str();
  check_est->add_option("--repetitions", est.consistency_repetitions,
                        "consistency repetitions")
      ->capture_default_str();
  check_est->add_option("--bias-runs", est.bias_runs)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return RunCommand(run_flags);
    if (sweep->parsed()) return SweepCommand(sweep_flags);
    if (weights->parsed()) return WeightsCommand(weight_flags);
    if (check_grad->parsed()) {
      return CheckGradCommand(grad_seed, grad_instances, grad_epsilon);
    }
    if (check_est->parsed()) return CheckEstimatorsCommand(est);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "prognosticator: %s\n", e.what());
    return 2;
  }
  return 1;
}
