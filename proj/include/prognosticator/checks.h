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


// Self-checks behind the check-grad and check-estimators commands: a
// finite-difference suite for every differentiated objective, and Monte
// Carlo studies of the NIS/NWIS estimators on a small MDP with a known value.

#ifndef PROGNOSTICATOR_CHECKS_H_
#define PROGNOSTICATOR_CHECKS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prognosticator/envs.h"
#include "prognosticator/policy.h"
#include "prognosticator/trajectory.h"

namespace prognosticator {

// Episodes drawn from `behavior` with Gaussian states, rewards uniform in
// [-1, 1] and lengths uniform in [1, max_length].
ReplayBuffer RandomBuffer(const Policy& behavior, int episodes,
                          int max_length, Rng& rng);

struct GradientSuiteOptions {
  std::uint64_t seed = 0;
  int instances = 50;
  double epsilon = 1e-5;
};

struct GradientCheckSummary {
  std::string objective;
  int instances = 0;
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped = 0;  // coordinates whose clip pattern flipped
};

// Objectives: log_prob, entropy, pdis, pro_ols, pro_wls, ftrl_pg. Instances
// alternate between softmax-linear and MLP policies.
std::vector<GradientCheckSummary> RunGradientSuite(
    const GradientSuiteOptions& options);

struct EstimatorSuiteOptions {
  std::uint64_t seed = 0;
  double gamma = 0.99;
  // Unbiasedness of NIS.
  int unbiased_runs = 5000;
  int unbiased_episodes = 20;
  int basis_dimension = 3;
  // Consistency of NIS and NWIS.
  int consistency_repetitions = 50;
  int small_episodes = 100;
  int large_episodes = 10000;
  // Small-sample bias of NWIS with a constant basis.
  int bias_runs = 20000;
  std::vector<int> bias_episodes{2, 8, 32};
};

struct UnbiasednessResult {
  double true_value = 0.0;
  double mean = 0.0;
  double standard_error = 0.0;
  // |mean - true_value| / standard_error.
  double z = 0.0;
};

struct ConsistencyResult {
  std::string estimator;  // "nis" or "nwis"
  double small_error = 0.0;
  double large_error = 0.0;
};

struct BiasPoint {
  int episodes = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

struct EstimatorSuiteResult {
  UnbiasednessResult nis_unbiased;
  std::vector<ConsistencyResult> consistency;
  double true_value = 0.0;
  std::vector<BiasPoint> nwis_bias;
};

// The target and behavior policies of the estimator studies on TwoStateMdp.
SoftmaxLinearPolicy EstimatorTargetPolicy();
SoftmaxLinearPolicy EstimatorBehaviorPolicy();

UnbiasednessResult RunUnbiasednessStudy(const EstimatorSuiteOptions& options);
std::vector<ConsistencyResult> RunConsistencyStudy(
    const EstimatorSuiteOptions& options);
std::vector<BiasPoint> RunNwisBiasStudy(const EstimatorSuiteOptions& options);
EstimatorSuiteResult RunEstimatorSuite(const EstimatorSuiteOptions& options);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_CHECKS_H_
