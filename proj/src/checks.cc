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


#include "prognosticator/checks.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "prognosticator/agents.h"
#include "prognosticator/estimators.h"
#include "prognosticator/gradients.h"
#include "prognosticator/harness.h"

namespace prognosticator {
namespace {

constexpr int kStateDim = 3;
constexpr int kActions = 3;

Vector Gaussian(int n, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

std::unique_ptr<Policy> RandomPolicy(int instance, Rng& rng) {
  if (instance % 2 == 0) {
    return std::make_unique<SoftmaxLinearPolicy>(
        kActions, kStateDim, Gaussian(kActions * kStateDim, 0.5, rng));
  }
  return std::make_unique<MlpSoftmaxPolicy>(kStateDim, 8, kActions, rng);
}

// A behavior policy near `target`, so importance ratios stay moderate.
std::unique_ptr<Policy> Perturbed(const Policy& target, Rng& rng) {
  std::unique_ptr<Policy> behavior = target.Clone();
  behavior->set_parameters(target.parameters() +
                           Gaussian(target.num_parameters(), 0.3, rng));
  return behavior;
}

std::optional<double> ClipFor(int instance) {
  switch (instance % 3) {
    case 0:
      return std::nullopt;
    case 1:
      return 10.0;
    default:
      return 2.0;
  }
}

TimeBasisConfig BasisFor(int instance) {
  switch (instance % 4) {
    case 0:
      return TimeBasisConfig(BasisFamily::kFourierCosine, 3);
    case 1:
      return TimeBasisConfig(BasisFamily::kFourierCosine, 5);
    case 2:
      return TimeBasisConfig(BasisFamily::kPolynomial, 3);
    default:
      return TimeBasisConfig(BasisFamily::kIdentity, 2);
  }
}

void Accumulate(GradientCheckSummary& summary,
                const FiniteDifferenceResult& result) {
  ++summary.instances;
  summary.max_relative_error =
      std::max(summary.max_relative_error, result.max_relative_error);
  summary.checked += result.checked;
  summary.skipped += result.skipped;
}

// Objective value of a fresh policy copy at theta.
template <typename F>
ScalarObjective WithTheta(const Policy& policy, F evaluate) {
  std::shared_ptr<Policy> probe = policy.Clone();
  return [probe, evaluate](const Vector& theta) {
    probe->set_parameters(theta);
    return evaluate(*probe);
  };
}

using ForecastGradient = std::function<GradientReport(
    const EpisodeBatch&, const Policy&, const ObjectiveOptions&)>;

FiniteDifferenceResult CheckForecastObjective(const ForecastGradient& gradient,
                                              int instance, double epsilon,
                                              Rng& rng) {
  const std::unique_ptr<Policy> policy = RandomPolicy(instance, rng);
  const std::unique_ptr<Policy> behavior = Perturbed(*policy, rng);
  const ReplayBuffer buffer = RandomBuffer(*behavior, 10, 4, rng);
  ObjectiveOptions options;
  options.gamma = 0.9;
  options.clip = ClipFor(instance);
  options.basis = BasisFor(instance);
  options.delta = 1 + instance % 3;
  options.lambda = 0.005;
  const EpisodeBatch all = buffer.All();
  const GradientReport report = gradient(all, *policy, options);
  ScalarObjective objective =
      WithTheta(*policy, [&all, &options, gradient](const Policy& p) {
        ObjectiveSample sample;
        sample.value = gradient(all, p, options).objective_value;
        sample.clip_pattern = ClipPattern(
            ComputeImportanceTerms(all, p, options.gamma, options.clip));
        return sample;
      });
  return FiniteDifferenceCheck(objective, policy->parameters(),
                               report.gradient, epsilon);
}

Trajectory RolloutBehavior(const TwoStateMdp& mdp, const Policy& behavior,
                           long episode, double gamma, Rng& rng) {
  return Rollout(mdp, behavior, episode, gamma, rng, rng);
}

ReplayBuffer CollectMdpEpisodes(const TwoStateMdp& mdp, const Policy& behavior,
                                int episodes, double gamma, Rng& rng) {
  ReplayBuffer buffer(mdp.state_dim());
  for (long k = 1; k <= episodes; ++k) {
    buffer.Insert(RolloutBehavior(mdp, behavior, k, gamma, rng));
  }
  return buffer;
}

}  // namespace

ReplayBuffer RandomBuffer(const Policy& behavior, int episodes,
                          int max_length, Rng& rng) {
  ReplayBuffer buffer(behavior.state_dim());
  std::uniform_int_distribution<int> length(1, max_length);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  for (long k = 1; k <= episodes; ++k) {
    Trajectory traj(k, behavior.state_dim());
    const int steps = length(rng);
    for (int t = 0; t < steps; ++t) {
      const Vector state = Gaussian(behavior.state_dim(), 1.0, rng);
      const SampledAction choice = behavior.SampleAction(state, rng);
      traj.AddStep(state, choice.action, choice.probability, reward(rng));
    }
    buffer.Insert(traj);
  }
  return buffer;
}

std::vector<GradientCheckSummary> RunGradientSuite(
    const GradientSuiteOptions& options) {
  Rng rng(options.seed);
  const double eps = options.epsilon;
  GradientCheckSummary log_prob{"log_prob"};
  GradientCheckSummary entropy{"entropy"};
  GradientCheckSummary pdis{"pdis"};
  GradientCheckSummary pro_ols{"pro_ols"};
  GradientCheckSummary pro_wls{"pro_wls"};
  GradientCheckSummary ftrl{"ftrl_pg"};

  for (int i = 0; i < options.instances; ++i) {
    {
      const std::unique_ptr<Policy> policy = RandomPolicy(i, rng);
      const Vector state = Gaussian(kStateDim, 1.0, rng);
      const int action = static_cast<int>(rng() % kActions);
      ScalarObjective objective =
          WithTheta(*policy, [state, action](const Policy& p) {
            return ObjectiveSample{
                std::log(p.ActionProbabilities(state)(action)), {}};
          });
      Accumulate(log_prob,
                 FiniteDifferenceCheck(objective, policy->parameters(),
                                       policy->LogProbGradient(state, action),
                                       eps));
    }
    {
      const std::unique_ptr<Policy> policy = RandomPolicy(i, rng);
      RowMajorMatrix states(5, kStateDim);
      for (int r = 0; r < 5; ++r) {
        states.row(r) = Gaussian(kStateDim, 1.0, rng).transpose();
      }
      ScalarObjective objective = WithTheta(*policy, [states](const Policy& p) {
        return ObjectiveSample{p.EntropyAndGradient(states).entropy, {}};
      });
      Accumulate(entropy, FiniteDifferenceCheck(
                              objective, policy->parameters(),
                              policy->EntropyAndGradient(states).gradient, eps));
    }
    {
      const std::unique_ptr<Policy> policy = RandomPolicy(i, rng);
      const std::unique_ptr<Policy> behavior = Perturbed(*policy, rng);
      const ReplayBuffer buffer = RandomBuffer(*behavior, 1, 6, rng);
      const EpisodeBatch episode = buffer.Episode(1);
      const std::optional<double> clip = ClipFor(i);
      constexpr double kGamma = 0.9;
      ScalarObjective objective =
          WithTheta(*policy, [&episode, clip](const Policy& p) {
            ObjectiveSample sample;
            const ImportanceTerms terms =
                ComputeImportanceTerms(episode, p, kGamma, clip);
            sample.value = terms.pdis(0);
            sample.clip_pattern = ClipPattern(terms);
            return sample;
          });
      Accumulate(pdis, FiniteDifferenceCheck(
                           objective, policy->parameters(),
                           PdisGradient(episode, *policy, kGamma, clip), eps));
    }
    Accumulate(pro_ols,
               CheckForecastObjective(
                   [](const EpisodeBatch& b, const Policy& p,
                      const ObjectiveOptions& o) {
                     return ProOlsGradient(b, p, o);
                   },
                   i, eps, rng));
    Accumulate(pro_wls,
               CheckForecastObjective(
                   [](const EpisodeBatch& b, const Policy& p,
                      const ObjectiveOptions& o) {
                     return ProWlsGradient(b, p, o);
                   },
                   i, eps, rng));
    Accumulate(ftrl, CheckForecastObjective(
                         [](const EpisodeBatch& b, const Policy& p,
                            const ObjectiveOptions& o) {
                           return FtrlGradient(b, p, o);
                         },
                         i, eps, rng));
  }
  return {log_prob, entropy, pdis, pro_ols, pro_wls, ftrl};
}

SoftmaxLinearPolicy EstimatorTargetPolicy() {
  Vector theta(4);
  theta << 0.8, -0.4, -0.8, 0.4;
  return SoftmaxLinearPolicy(2, 2, theta);
}

SoftmaxLinearPolicy EstimatorBehaviorPolicy() {
  return SoftmaxLinearPolicy(2, 2);
}

UnbiasednessResult RunUnbiasednessStudy(const EstimatorSuiteOptions& options) {
  const TwoStateMdp mdp;
  const SoftmaxLinearPolicy target = EstimatorTargetPolicy();
  const SoftmaxLinearPolicy behavior = EstimatorBehaviorPolicy();
  const TimeBasisConfig basis(BasisFamily::kFourierCosine,
                              options.basis_dimension);
  Rng rng(options.seed + 1);
  std::vector<double> forecasts;
  forecasts.reserve(options.unbiased_runs);
  for (int r = 0; r < options.unbiased_runs; ++r) {
    const ReplayBuffer buffer = CollectMdpEpisodes(
        mdp, behavior, options.unbiased_episodes, options.gamma, rng);
    forecasts.push_back(NisForecast(buffer.All(), target, options.gamma,
                                    std::nullopt, basis, 1)(0));
  }
  UnbiasednessResult result;
  result.true_value = mdp.ExactValue(target, options.gamma);
  const MeanAndError s = Summarize(forecasts);
  result.mean = s.mean;
  result.standard_error = s.standard_error;
  result.z = std::abs(s.mean - result.true_value) / s.standard_error;
  return result;
}

std::vector<ConsistencyResult> RunConsistencyStudy(
    const EstimatorSuiteOptions& options) {
  const TwoStateMdp mdp;
  const SoftmaxLinearPolicy target = EstimatorTargetPolicy();
  const SoftmaxLinearPolicy behavior = EstimatorBehaviorPolicy();
  const TimeBasisConfig basis(BasisFamily::kFourierCosine,
                              options.basis_dimension);
  const double truth = mdp.ExactValue(target, options.gamma);
  Rng rng(options.seed + 2);
  ConsistencyResult nis{"nis"};
  ConsistencyResult nwis{"nwis"};
  for (int r = 0; r < options.consistency_repetitions; ++r) {
    const ReplayBuffer buffer = CollectMdpEpisodes(
        mdp, behavior, options.large_episodes, options.gamma, rng);
    const EpisodeBatch small = buffer.Slice(1, options.small_episodes);
    const EpisodeBatch large = buffer.All();
    nis.small_error += std::abs(
        NisForecast(small, target, options.gamma, std::nullopt, basis, 1)(0) -
        truth);
    nis.large_error += std::abs(
        NisForecast(large, target, options.gamma, std::nullopt, basis, 1)(0) -
        truth);
    nwis.small_error += std::abs(
        NwisForecast(small, target, options.gamma, std::nullopt, basis, 1)(0) -
        truth);
    nwis.large_error += std::abs(
        NwisForecast(large, target, options.gamma, std::nullopt, basis, 1)(0) -
        truth);
  }
  for (ConsistencyResult* c : {&nis, &nwis}) {
    c->small_error /= options.consistency_repetitions;
    c->large_error /= options.consistency_repetitions;
  }
  return {nis, nwis};
}

std::vector<BiasPoint> RunNwisBiasStudy(const EstimatorSuiteOptions& options) {
  const TwoStateMdp mdp;
  const SoftmaxLinearPolicy target = EstimatorTargetPolicy();
  const SoftmaxLinearPolicy behavior = EstimatorBehaviorPolicy();
  const TimeBasisConfig constant(BasisFamily::kConstant, 1);
  const double truth = mdp.ExactValue(target, options.gamma);
  Rng rng(options.seed + 3);
  std::vector<BiasPoint> points;
  for (int n : options.bias_episodes) {
    std::vector<double> estimates;
    estimates.reserve(options.bias_runs);
    for (int r = 0; r < options.bias_runs; ++r) {
      const ReplayBuffer buffer =
          CollectMdpEpisodes(mdp, behavior, n, options.gamma, rng);
      estimates.push_back(NwisForecast(buffer.All(), target, options.gamma,
                                       std::nullopt, constant, 1)(0));
    }
    const MeanAndError s = Summarize(estimates);
    points.push_back(
        {n, s.mean, s.standard_error, std::abs(s.mean - truth) / s.standard_error});
  }
  return points;
}

EstimatorSuiteResult RunEstimatorSuite(const EstimatorSuiteOptions& options) {
  EstimatorSuiteResult result;
  result.nis_unbiased = RunUnbiasednessStudy(options);
  result.consistency = RunConsistencyStudy(options);
  result.true_value = result.nis_unbiased.true_value;
  result.nwis_bias = RunNwisBiasStudy(options);
  return result;
}

}  // namespace prognosticator
