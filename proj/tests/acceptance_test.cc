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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `--only 1,4` restricts the run to some criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prognosticator/agents.h"
#include "prognosticator/basis.h"
#include "prognosticator/checks.h"
#include "prognosticator/config.h"
#include "prognosticator/estimators.h"
#include "prognosticator/gradients.h"
#include "prognosticator/harness.h"
#include "prognosticator/policy.h"

namespace prognosticator {
namespace {

struct Verdict {
  bool pass = false;
  std::vector<std::string> details;
};

std::string Format(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, a);
  return buf;
}

int SignChanges(const Vector& v) {
  int changes = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if ((v(i - 1) < 0.0) != (v(i) < 0.0)) ++changes;
  }
  return changes;
}

// 1. Weight-sum identity over the full grid of bases, k and delta.
Verdict WeightSum() {
  std::vector<TimeBasisConfig> bases{
      TimeBasisConfig(BasisFamily::kConstant, 1),
      TimeBasisConfig(BasisFamily::kIdentity, 2)};
  for (int d : {3, 5, 7}) {
    bases.emplace_back(BasisFamily::kPolynomial, d);
  }
  for (int d : {3, 5, 7}) {
    bases.emplace_back(BasisFamily::kFourierCosine, d);
  }
  Verdict v;
  int total = 0;
  int passed = 0;
  double worst = 0.0;
  std::vector<std::string> failures;
  for (const TimeBasisConfig& basis : bases) {
    for (long k : {5L, 20L, 99L}) {
      for (int delta : {1, 3, 5}) {
        ++total;
        const std::string label = basis.ToString() + " k=" +
                                  std::to_string(k) +
                                  " delta=" + std::to_string(delta);
        try {
          const double error =
              std::abs(ForecastWeights(k, delta, basis).sum() - 1.0);
          if (error < 1e-8) {
            ++passed;
            worst = std::max(worst, error);
          } else {
            failures.push_back(label + ": |sum - 1| = " +
                               Format("%.3g", error));
          }
        } catch (const std::exception& e) {
          failures.push_back(label + ": " + e.what());
        }
      }
    }
  }
  v.pass = failures.empty();
  v.details.push_back(std::to_string(passed) + "/" + std::to_string(total) +
                      " combinations within 1e-8 (worst " +
                      Format("%.2e", worst) + ")");
  for (const std::string& f : failures) v.details.push_back(f);
  return v;
}

// 2. Shape of the forecast weights.
Verdict WeightShape() {
  Verdict v;
  const Vector identity =
      ForecastWeights(99, 1, TimeBasisConfig(BasisFamily::kIdentity, 2));
  const double step = identity(1) - identity(0);
  double affine_error = 0.0;
  for (Eigen::Index i = 0; i < identity.size(); ++i) {
    affine_error = std::max(
        affine_error,
        std::abs(identity(i) - identity(0) - step * static_cast<double>(i)));
  }
  const bool affine = affine_error < 1e-12;
  const bool signs = identity(0) < 0.0 && identity(98) > 0.0;
  const Vector fourier =
      ForecastWeights(99, 1, TimeBasisConfig(BasisFamily::kFourierCosine, 5));
  const int negatives = static_cast<int>((fourier.array() < 0.0).count());
  const int changes = SignChanges(fourier);
  v.pass = affine && signs && negatives > 0 && changes >= 2;
  v.details.push_back("identity: affine residual " +
                      Format("%.2e", affine_error) + ", zeta_1 = " +
                      Format("%.4f", identity(0)) + ", zeta_99 = " +
                      Format("%.4f", identity(98)));
  v.details.push_back("fourier d=5: " + std::to_string(negatives) +
                      " negative weights, " + std::to_string(changes) +
                      " sign changes");
  return v;
}

// 3. Finite-difference agreement of every analytic gradient.
Verdict GradientFidelity() {
  Verdict v;
  GradientSuiteOptions options;
  options.instances = 50;
  options.epsilon = 1e-5;
  v.pass = true;
  for (const GradientCheckSummary& s : RunGradientSuite(options)) {
    const bool ok = s.max_relative_error < 1e-4 && s.checked > 0;
    v.pass = v.pass && ok;
    v.details.push_back(s.objective + ": max relative error " +
                        Format("%.2e", s.max_relative_error) + " over " +
                        std::to_string(s.checked) + " coordinates");
  }
  return v;
}

// 4. NWIS with a constant basis is weighted importance sampling.
Verdict WisReduction() {
  Verdict v;
  Rng rng(404);
  double worst = 0.0;
  const TimeBasisConfig constant(BasisFamily::kConstant, 1);
  for (int b = 0; b < 100; ++b) {
    const SoftmaxLinearPolicy behavior(3, 2, Vector::Zero(6));
    std::normal_distribution<double> normal(0.0, 0.7);
    Vector theta(6);
    for (int i = 0; i < 6; ++i) theta(i) = normal(rng);
    const SoftmaxLinearPolicy target(3, 2, theta);
    const ReplayBuffer buffer = RandomBuffer(behavior, 5 + b % 20, 6, rng);
    const ImportanceTerms terms =
        ComputeImportanceTerms(buffer.All(), target, 0.95, 10.0);
    const double nwis = FitNwis(terms.returns, terms.trajectory_ratio, 1,
                                constant)
                            .forecasts(0);
    const double wis = terms.trajectory_ratio.dot(terms.returns) /
                       terms.trajectory_ratio.sum();
    worst = std::max(worst, std::abs(nwis - wis));
  }
  v.pass = worst < 1e-12;
  v.details.push_back("max |NWIS - WIS| over 100 buffers " +
                      Format("%.2e", worst));
  return v;
}

// 5. NIS is unbiased on a stationary MDP.
Verdict NisUnbiased() {
  Verdict v;
  EstimatorSuiteOptions options;
  options.unbiased_runs = 5000;
  options.unbiased_episodes = 20;
  options.basis_dimension = 3;
  const UnbiasednessResult r = RunUnbiasednessStudy(options);
  v.pass = r.z < 3.0;
  v.details.push_back("J = " + Format("%.5f", r.true_value) + ", mean " +
                      Format("%.5f", r.mean) + ", SE " +
                      Format("%.5f", r.standard_error) + ", z = " +
                      Format("%.2f", r.z));
  return v;
}

// 6. NIS and NWIS errors shrink with more data.
Verdict Consistency() {
  Verdict v;
  EstimatorSuiteOptions options;
  options.consistency_repetitions = 50;
  options.small_episodes = 100;
  options.large_episodes = 10000;
  v.pass = true;
  for (const ConsistencyResult& c : RunConsistencyStudy(options)) {
    v.pass = v.pass && c.large_error < c.small_error;
    v.details.push_back(c.estimator + ": mean |error| " +
                        Format("%.5f", c.small_error) + " at N=100, " +
                        Format("%.5f", c.large_error) + " at N=10000");
  }
  return v;
}

// 7. Pro-OLS with a constant basis is FTRL-PG.
Verdict Degeneracy() {
  Verdict v;
  Rng rng(707);
  double worst = 0.0;
  for (int b = 0; b < 50; ++b) {
    std::unique_ptr<Policy> behavior;
    std::unique_ptr<Policy> target;
    if (b % 2 == 0) {
      behavior = std::make_unique<SoftmaxLinearPolicy>(3, 2);
      std::normal_distribution<double> normal;
      Vector theta(6);
      for (int i = 0; i < 6; ++i) theta(i) = normal(rng);
      target = std::make_unique<SoftmaxLinearPolicy>(3, 2, theta);
    } else {
      behavior = std::make_unique<MlpSoftmaxPolicy>(2, 8, 3, rng);
      target = std::make_unique<MlpSoftmaxPolicy>(2, 8, 3, rng);
    }
    const ReplayBuffer buffer = RandomBuffer(*behavior, 3 + b % 30, 6, rng);
    ObjectiveOptions options;
    options.basis = TimeBasisConfig(BasisFamily::kConstant, 1);
    options.delta = 1 + b % 5;
    options.lambda = 0.01;
    const GradientReport ols = ProOlsGradient(buffer.All(), *target, options);
    const GradientReport ftrl = FtrlGradient(buffer.All(), *target, options);
    worst = std::max(worst,
                     (ols.gradient - ftrl.gradient).cwiseAbs().maxCoeff());
  }
  v.pass = worst < 1e-10;
  v.details.push_back("max |g_pro_ols - g_ftrl_pg| over 50 buffers " +
                      Format("%.2e", worst));
  return v;
}

double Combined(const RegretRow& a, const RegretRow& b) {
  return std::hypot(a.standard_error, b.standard_error);
}

std::string Describe(const RegretRow& r) {
  return std::string(AgentKindName(r.agent)) + " " + Format("%.4f", r.mean) +
         " (" + Format("%.4f", r.standard_error) + ")";
}

// Prognosticators beat both baselines by more than one combined SE at every
// speed >= 2.
bool ProgBeatsBaselines(const RegretTable& table, RegretMetric metric,
                        const std::vector<int>& speeds, Verdict& v) {
  bool ok = true;
  for (int speed : speeds) {
    if (speed < 2) continue;
    std::string line = "speed " + std::to_string(speed) + ":";
    for (AgentKind a : {AgentKind::kProOls, AgentKind::kProWls,
                        AgentKind::kOnpg, AgentKind::kFtrlPg}) {
      line += " " + Describe(table.Find(a, speed, metric));
    }
    for (AgentKind p : {AgentKind::kProOls, AgentKind::kProWls}) {
      for (AgentKind b : {AgentKind::kOnpg, AgentKind::kFtrlPg}) {
        const RegretRow& pr = table.Find(p, speed, metric);
        const RegretRow& br = table.Find(b, speed, metric);
        if (!(br.mean - pr.mean > Combined(pr, br))) {
          ok = false;
          line += " [" + std::string(AgentKindName(p)) + " vs " +
                  std::string(AgentKindName(b)) + " gap " +
                  Format("%.4f", br.mean - pr.mean) + " <= " +
                  Format("%.4f", Combined(pr, br)) + "]";
        }
      }
    }
    v.details.push_back(line);
  }
  return ok;
}

ExperimentConfig ProtocolConfig(EnvKind env, std::vector<int> speeds,
                                int threads) {
  ExperimentConfig c = DefaultExperimentConfig(env);
  c.speeds = std::move(speeds);
  c.seeds = 10;
  c.episodes = 2000;
  c.threads = threads;
  return c;
}

// 8. Recommender, true regret.
Verdict RecommenderOrdering(int threads) {
  Verdict v;
  const std::vector<int> speeds{0, 2, 3, 4};
  const ExperimentResult r =
      RunExperiment(ProtocolConfig(EnvKind::kRecommender, speeds, threads));
  const RegretTable& t = r.regret;
  const std::vector<AgentKind> agents{AgentKind::kProOls, AgentKind::kProWls,
                                      AgentKind::kOnpg, AgentKind::kFtrlPg};
  bool within = true;
  bool ftrl_best = true;
  std::string line = "speed 0:";
  for (AgentKind a : agents) {
    const RegretRow& ra = t.Find(a, 0, RegretMetric::kTrue);
    line += " " + Describe(ra);
    for (AgentKind b : agents) {
      const RegretRow& rb = t.Find(b, 0, RegretMetric::kTrue);
      if (std::abs(ra.mean - rb.mean) > 2.0 * Combined(ra, rb)) within = false;
    }
    if (a != AgentKind::kFtrlPg &&
        ra.mean < t.Find(AgentKind::kFtrlPg, 0, RegretMetric::kTrue).mean) {
      ftrl_best = false;
    }
  }
  line += within ? " [within 2 SE]" : "";
  line += ftrl_best ? " [ftrl_pg best]" : "";
  v.details.push_back(line);
  const bool moving =
      ProgBeatsBaselines(t, RegretMetric::kTrue, speeds, v);
  v.pass = (within || ftrl_best) && moving;
  return v;
}

// 9. Goal reacher, surrogate regret.
Verdict GoalReacherOrdering(int threads) {
  Verdict v;
  const std::vector<int> speeds{2, 3, 4};
  const ExperimentResult r =
      RunExperiment(ProtocolConfig(EnvKind::kGoalReacher, speeds, threads));
  v.pass = ProgBeatsBaselines(r.regret, RegretMetric::kSurrogate, speeds, v);
  return v;
}

std::string CsvBytes(const ExperimentResult& r) {
  std::ostringstream out;
  WriteEpisodesCsv(FlattenTrials(r.trials), out);
  WriteRegretCsv(r.regret, out);
  return out.str();
}

// 10. Same seeds, same bytes, independent of the thread count.
Verdict Determinism(int threads) {
  Verdict v;
  v.pass = true;
  for (EnvKind env : {EnvKind::kRecommender, EnvKind::kGoalReacher}) {
    ExperimentConfig c = DefaultExperimentConfig(env);
    c.speeds = {0, 3};
    c.seeds = 2;
    c.episodes = 300;
    c.threads = 1;
    const std::string first = CsvBytes(RunExperiment(c));
    c.threads = threads;
    const std::string second = CsvBytes(RunExperiment(c));
    const bool same = first == second;
    v.pass = v.pass && same;
    v.details.push_back(std::string(EnvKindName(env)) + ": " +
                        std::to_string(first.size()) + " bytes, " +
                        (same ? "identical" : "DIFFERENT") +
                        " across reruns");
  }
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace prognosticator

int main(int argc, char** argv) {
  using namespace prognosticator;
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  int threads = 0;
  app.add_option("--only", only, "criteria to run (default: all)")
      ->delimiter(',');
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "weight-sum identity", 1.0, WeightSum},
      {2, "forecast weight shape", 1.0, WeightShape},
      {3, "gradient fidelity", 30.0, GradientFidelity},
      {4, "WIS reduction", 1.0, WisReduction},
      {5, "NIS unbiased", 60.0, NisUnbiased},
      {6, "NIS/NWIS consistency", 300.0, Consistency},
      {7, "constant-basis degeneracy", 0.0, Degeneracy},
      {8, "recommender ordering", 600.0,
       [threads] { return RecommenderOrdering(threads); }},
      {9, "goal reacher ordering", 900.0,
       [threads] { return GoalReacherOrdering(threads); }},
      {10, "determinism", 0.0, [threads] { return Determinism(threads); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.details.push_back(std::string("error: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_time = c.budget_seconds <= 0.0 || seconds < c.budget_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d %s: %s (%.1f s%s)\n", c.id, c.name,
                pass ? "PASS" : "FAIL", seconds,
                in_time ? "" : ", over the time budget");
    for (const std::string& d : v.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
