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

#include "prognosticator/agents.h"

#include <algorithm>
#include <string>

namespace prognosticator {
namespace {

ObjectiveOptions MakeObjective(const AgentConfig& config) {
  ObjectiveOptions options;
  options.gamma = config.gamma;
  options.clip = config.clip;
  if (config.basis) options.basis = *config.basis;
  options.delta = config.delta;
  options.lambda = config.lambda;
  options.entropy_episodes = config.delta;
  options.stop_gradient_weights = config.stop_gradient_weights;
  return options;
}

void NoteRead(AgentStats* stats, long episodes) {
  if (stats == nullptr) return;
  if (stats->updates == 0 || episodes < stats->min_episodes_read) {
    stats->min_episodes_read = episodes;
  }
  stats->max_episodes_read = std::max(stats->max_episodes_read, episodes);
  stats->last_episodes_read = episodes;
}

void Ascend(Policy& policy, const Vector& gradient, double eta, long k) {
  Vector theta = policy.parameters() + eta * gradient;
  if (!theta.allFinite()) {
    throw DivergenceError("policy parameters diverged after episode " +
                          std::to_string(k));
  }
  policy.set_parameters(theta);
}

}  // namespace

std::string_view AgentKindName(AgentKind kind) {
  switch (kind) {
    case AgentKind::kProOls:
      return "pro_ols";
    case AgentKind::kProWls:
      return "pro_wls";
    case AgentKind::kOnpg:
      return "onpg";
    case AgentKind::kFtrlPg:
      return "ftrl_pg";
  }
  return "unknown";
}

AgentKind ParseAgentKind(std::string_view name) {
  if (name == "pro_ols" || name == "pro-ols") return AgentKind::kProOls;
  if (name == "pro_wls" || name == "pro-wls") return AgentKind::kProWls;
  if (name == "onpg") return AgentKind::kOnpg;
  if (name == "ftrl_pg" || name == "ftrl-pg" || name == "ftrl") {
    return AgentKind::kFtrlPg;
  }
  throw ConfigError("unknown agent '" + std::string(name) + "'");
}

void AgentConfig::Validate() const {
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (delta < 1) throw ConfigError("delta must be positive");
  if (inner_iterations < 1) {
    throw ConfigError("inner_iterations must be positive");
  }
  if (clip && !(*clip > 0.0)) throw ConfigError("clip must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1]");
  }
  if (is_forecasting() != basis.has_value()) {
    throw ConfigError(std::string("agent ") +
                      std::string(AgentKindName(kind)) +
                      (is_forecasting() ? " needs" : " takes no") +
                      " time basis");
  }
}

AgentConfig DefaultAgentConfig(AgentKind kind) {
  AgentConfig config;
  config.kind = kind;
  if (!config.is_forecasting()) config.basis.reset();
  return config;
}

GradientReport AgentGradient(const ReplayBuffer& buffer,
                             const AgentConfig& config, const Policy& policy) {
  const ObjectiveOptions options = MakeObjective(config);
  switch (config.kind) {
    case AgentKind::kProOls:
      return ProOlsGradient(buffer.All(), policy, options);
    case AgentKind::kProWls:
      return ProWlsGradient(buffer.All(), policy, options);
    case AgentKind::kFtrlPg:
      return FtrlGradient(buffer.All(), policy, options);
    case AgentKind::kOnpg: {
      const int n = std::min(config.delta, buffer.size());
      return WeightedPdisGradient(buffer.Recent(n), policy,
                                  Vector::Constant(n, 1.0 / n), config.gamma,
                                  config.clip, config.lambda, n);
    }
  }
  throw ConfigError("unknown agent kind");
}

int UpdatePolicy(const ReplayBuffer& buffer, const AgentConfig& config,
                 Policy& policy, AgentStats* stats) {
  const long k = buffer.size();
  if (k == 0) return 0;
  const ObjectiveOptions options = MakeObjective(config);
  int steps = 0;
  switch (config.kind) {
    case AgentKind::kProOls:
    case AgentKind::kFtrlPg: {
      Vector weights;
      if (config.kind == AgentKind::kProOls) {
        if (k < config.basis->dimension()) {
          if (stats != nullptr) ++stats->skipped_updates;
          return 0;
        }
        // zeta depends only on k, delta and the basis.
        weights = ForecastWeights(k, config.delta, *config.basis);
      } else {
        weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
      }
      const EpisodeBatch all = buffer.All();
      for (int i = 0; i < config.inner_iterations; ++i) {
        const GradientReport report =
            WeightedPdisGradient(all, policy, weights, config.gamma,
                                 config.clip, config.lambda, config.delta);
        Ascend(policy, report.gradient, config.eta, k);
        ++steps;
      }
      NoteRead(stats, k);
      break;
    }
    case AgentKind::kProWls: {
      if (k < config.basis->dimension()) {
        if (stats != nullptr) ++stats->skipped_updates;
        return 0;
      }
      const EpisodeBatch all = buffer.All();
      const ForecastDesign design =
          MakeForecastDesign(k, config.delta, *config.basis);
      for (int i = 0; i < config.inner_iterations; ++i) {
        const GradientReport report =
            ProWlsGradient(all, policy, options, &design);
        Ascend(policy, report.gradient, config.eta, k);
        ++steps;
      }
      NoteRead(stats, k);
      break;
    }
    case AgentKind::kOnpg: {
      const GradientReport report = AgentGradient(buffer, config, policy);
      Ascend(policy, report.gradient, config.eta, k);
      steps = 1;
      NoteRead(stats, std::min<long>(config.delta, k));
      break;
    }
  }
  if (stats != nullptr) {
    ++stats->updates;
    stats->gradient_steps += steps;
  }
  return steps;
}

Trajectory Rollout(const Environment& env, const Policy& policy, long episode,
                   double gamma, Rng& agent_rng, Rng& env_rng,
                   EpisodeRecord* record) {
  Trajectory traj(episode, env.state_dim());
  Vector state = env.Reset(episode, env_rng);
  EpisodeRecord local;
  local.episode = episode;
  local.expected_return = env.ExpectedReturn(policy, episode);
  {
    const Vector probs = policy.ActionProbabilities(state);
    local.entropy = -(probs.array() * probs.array().log()).sum();
  }
  double discount = 1.0;
  for (int t = 0; t < env.horizon(); ++t) {
    const SampledAction choice = policy.SampleAction(state, agent_rng);
    StepResult step = env.Step(state, choice.action, t, episode, env_rng);
    traj.AddStep(state, choice.action, choice.probability, step.reward);
    local.observed_return += step.reward;
    local.discounted_return += discount * step.reward;
    discount *= gamma;
    state = std::move(step.next_state);
    if (step.done) break;
  }
  if (record != nullptr) *record = local;
  return traj;
}

EpisodeLog RunAgent(const Environment& env, const AgentConfig& config,
                    Policy& policy, int num_episodes, Rng& agent_rng,
                    Rng& env_rng, ReplayBuffer* buffer) {
  config.Validate();
  if (num_episodes < 1) {
    throw DomainError("episode budget must be positive");
  }
  if (policy.state_dim() != env.state_dim() ||
      policy.num_actions() != env.num_actions()) {
    throw DimensionError("policy does not match the environment");
  }
  ReplayBuffer local(env.state_dim());
  if (buffer == nullptr) {
    buffer = &local;
  } else if (!buffer->empty() || buffer->state_dim() != env.state_dim()) {
    throw DomainError("RunAgent needs an empty buffer of the env's state size");
  }
  EpisodeLog log;
  log.episodes.reserve(num_episodes);
  for (long k = 1; k <= num_episodes; ++k) {
    EpisodeRecord record;
    buffer->Insert(
        Rollout(env, policy, k, config.gamma, agent_rng, env_rng, &record));
    log.episodes.push_back(record);
    if (k % config.delta == 0) {
      UpdatePolicy(*buffer, config, policy, &log.stats);
    }
  }
  return log;
}

}  // namespace prognosticator
