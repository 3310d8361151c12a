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

#ifndef PROGNOSTICATOR_AGENTS_H_
#define PROGNOSTICATOR_AGENTS_H_

#include <optional>
#include <string_view>
#include <vector>

#include "prognosticator/basis.h"
#include "prognosticator/envs.h"
#include "prognosticator/gradients.h"
#include "prognosticator/policy.h"
#include "prognosticator/trajectory.h"

namespace prognosticator {

enum class AgentKind { kProOls, kProWls, kOnpg, kFtrlPg };

std::string_view AgentKindName(AgentKind kind);
// "pro_ols", "pro_wls", "onpg", "ftrl_pg".
AgentKind ParseAgentKind(std::string_view name);

struct AgentConfig {
  AgentKind kind = AgentKind::kProOls;
  double eta = 0.01;
  double lambda = 0.003;
  int delta = 3;
  int inner_iterations = 30;
  std::optional<double> clip = 10.0;
  double gamma = 0.99;
  // Present exactly for the Pro-* agents.
  std::optional<TimeBasisConfig> basis =
      TimeBasisConfig(BasisFamily::kFourierHalf, 3);
  bool stop_gradient_weights = false;

  // Throws ConfigError when a field is out of range.
  void Validate() const;
  bool is_forecasting() const {
    return kind == AgentKind::kProOls || kind == AgentKind::kProWls;
  }
};

// Default configuration for `kind`; the basis is dropped for the baselines.
AgentConfig DefaultAgentConfig(AgentKind kind);

struct EpisodeRecord {
  long episode = 0;
  double observed_return = 0.0;  // undiscounted sum of rewards
  double discounted_return = 0.0;
  std::optional<double> expected_return;
  double entropy = 0.0;  // policy entropy at the episode's start state
};

struct AgentStats {
  long updates = 0;
  long skipped_updates = 0;  // forecasting agents before k >= d
  long gradient_steps = 0;
  long min_episodes_read = 0;
  long max_episodes_read = 0;
  long last_episodes_read = 0;
};

struct EpisodeLog {
  std::vector<EpisodeRecord> episodes;
  AgentStats stats;
};

// Collects `delta` episodes with the current policy (recording the sampled
// action probabilities as behavior probabilities), then updates the policy
// by gradient ascent:
//   Pro-OLS / Pro-WLS: inner_iterations steps on the mean forecast over the
//                      next delta episodes, whole buffer;
//   FTRL-PG:           inner_iterations steps on the mean PDIS estimate of
//                      every episode so far;
//   ONPG:              one step on the mean return of the newest batch.
// A trailing batch shorter than delta is played without a following
// update. Throws DivergenceError if the parameters stop being finite.
// If `buffer` is given it must be empty and receives every episode.
EpisodeLog RunAgent(const Environment& env, const AgentConfig& config,
                    Policy& policy, int num_episodes, Rng& agent_rng,
                    Rng& env_rng, ReplayBuffer* buffer = nullptr);

// Plays one episode with `policy`, filling `record` if given.
Trajectory Rollout(const Environment& env, const Policy& policy, long episode,
                   double gamma, Rng& agent_rng, Rng& env_rng,
                   EpisodeRecord* record = nullptr);

// One policy update on `buffer`, as RunAgent performs after each batch.
// Returns the number of gradient steps taken.
int UpdatePolicy(const ReplayBuffer& buffer, const AgentConfig& config,
                 Policy& policy, AgentStats* stats = nullptr);

// The ascent direction the agent would use for its first step on `buffer`.
GradientReport AgentGradient(const ReplayBuffer& buffer,
                             const AgentConfig& config, const Policy& policy);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_AGENTS_H_
