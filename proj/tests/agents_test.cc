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

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "prognosticator/checks.h"
#include "prognosticator/envs.h"
#include "prognosticator/errors.h"

namespace prognosticator {
namespace {

const AgentKind kAllAgents[] = {AgentKind::kProOls, AgentKind::kProWls,
                                AgentKind::kOnpg, AgentKind::kFtrlPg};

TEST(AgentKindTest, NamesRoundTrip) {
  for (AgentKind kind : kAllAgents) {
    EXPECT_EQ(ParseAgentKind(AgentKindName(kind)), kind);
  }
  EXPECT_THROW(ParseAgentKind("ppo"), ConfigError);
}

TEST(AgentConfigTest, DefaultsValidate) {
  for (AgentKind kind : kAllAgents) {
    const AgentConfig config = DefaultAgentConfig(kind);
    EXPECT_NO_THROW(config.Validate());
    EXPECT_EQ(config.basis.has_value(), config.is_forecasting());
  }
}

TEST(AgentConfigTest, RejectsBadFields) {
  AgentConfig config = DefaultAgentConfig(AgentKind::kProOls);
  config.eta = 0.0;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = DefaultAgentConfig(AgentKind::kProOls);
  config.basis.reset();
  EXPECT_THROW(config.Validate(), ConfigError);
  config = DefaultAgentConfig(AgentKind::kOnpg);
  config.basis = TimeBasisConfig(BasisFamily::kConstant, 1);
  EXPECT_THROW(config.Validate(), ConfigError);
  config = DefaultAgentConfig(AgentKind::kFtrlPg);
  config.delta = 0;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = DefaultAgentConfig(AgentKind::kFtrlPg);
  config.clip = -1.0;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = DefaultAgentConfig(AgentKind::kFtrlPg);
  config.lambda = -0.1;
  EXPECT_THROW(config.Validate(), ConfigError);
}

ReplayBuffer SharedBuffer(std::uint64_t seed, int episodes) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 0.4);
  Vector theta(9);
  for (int i = 0; i < 9; ++i) theta(i) = normal(rng);
  const SoftmaxLinearPolicy behavior(3, 3, theta);
  return RandomBuffer(behavior, episodes, 5, rng);
}

TEST(AgentGradientTest, ProOlsConstantBasisIsFtrlDirection) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ReplayBuffer buffer = SharedBuffer(seed, 6 + int(seed));
    Rng rng(seed + 100);
    std::normal_distribution<double> normal(0.0, 0.4);
    Vector theta(9);
    for (int i = 0; i < 9; ++i) theta(i) = normal(rng);
    const SoftmaxLinearPolicy policy(3, 3, theta);
    AgentConfig pro = DefaultAgentConfig(AgentKind::kProOls);
    pro.basis = TimeBasisConfig(BasisFamily::kConstant, 1);
    const AgentConfig ftrl = DefaultAgentConfig(AgentKind::kFtrlPg);
    const Vector a = AgentGradient(buffer, pro, policy).gradient;
    const Vector b = AgentGradient(buffer, ftrl, policy).gradient;
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(AgentGradientTest, OnpgAtUniformIsReinforce) {
  const int items = 5;
  ReplayBuffer buffer(1);
  Trajectory traj(1, 1);
  traj.AddStep(Vector::Ones(1), 2, 0.2, 0.7);
  buffer.Insert(traj);
  AgentConfig config = DefaultAgentConfig(AgentKind::kOnpg);
  config.delta = 1;
  config.lambda = 0.01;
  const SoftmaxLinearPolicy policy(items, 1);
  const Vector g = AgentGradient(buffer, config, policy).gradient;
  // r (e_a - pi); the entropy gradient vanishes at the uniform policy.
  Vector expected = Vector::Constant(items, -0.2 * 0.7);
  expected(2) = 0.8 * 0.7;
  EXPECT_LT((g - expected).cwiseAbs().maxCoeff(), 1e-15);
}

EpisodeLog RunFor(AgentKind kind, const Environment& env, int episodes,
               std::uint64_t seed, Policy& policy,
               ReplayBuffer* buffer = nullptr,
               AgentConfig* override = nullptr) {
  AgentConfig config = override ? *override : DefaultAgentConfig(kind);
  Rng agent_rng(seed), env_rng(seed + 1);
  return RunAgent(env, config, policy, episodes, agent_rng, env_rng, buffer);
}

TEST(RunAgentTest, BitwiseDeterministic) {
  RecommenderConfig rc;
  rc.speed = 2;
  const RecommenderEnv env(rc);
  for (AgentKind kind : kAllAgents) {
    SoftmaxLinearPolicy p1(5, 1), p2(5, 1);
    const EpisodeLog a = RunFor(kind, env, 60, 9, p1);
    const EpisodeLog b = RunFor(kind, env, 60, 9, p2);
    ASSERT_EQ(a.episodes.size(), b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
      EXPECT_EQ(a.episodes[i].observed_return, b.episodes[i].observed_return);
      EXPECT_EQ(*a.episodes[i].expected_return,
                *b.episodes[i].expected_return);
    }
    EXPECT_EQ(std::memcmp(p1.parameters().data(), p2.parameters().data(),
                          sizeof(double) * p1.num_parameters()),
              0);
  }
}

TEST(RunAgentTest, BufferDisciplineAndInnerLoopCounts) {
  const RecommenderEnv env{RecommenderConfig{}};
  for (AgentKind kind : kAllAgents) {
    SoftmaxLinearPolicy policy(5, 1);
    const AgentConfig config = DefaultAgentConfig(kind);
    const EpisodeLog log = RunFor(kind, env, 30, 1, policy);
    ASSERT_EQ(log.episodes.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) {
      EXPECT_EQ(log.episodes[i].episode, long(i) + 1);
    }
    const AgentStats& s = log.stats;
    if (kind == AgentKind::kOnpg) {
      EXPECT_EQ(s.updates, 10);
      EXPECT_EQ(s.gradient_steps, 10);
      EXPECT_EQ(s.max_episodes_read, config.delta);
      EXPECT_EQ(s.min_episodes_read, config.delta);
    } else {
      EXPECT_EQ(s.gradient_steps, s.updates * config.inner_iterations);
      EXPECT_EQ(s.last_episodes_read, 30);
      EXPECT_EQ(s.updates + s.skipped_updates, 10);
    }
    if (kind == AgentKind::kFtrlPg) {
      EXPECT_EQ(s.min_episodes_read, config.delta);
    }
  }
}

TEST(RunAgentTest, ForecastersWaitForEnoughEpisodes) {
  const RecommenderEnv env{RecommenderConfig{}};
  AgentConfig config = DefaultAgentConfig(AgentKind::kProWls);
  config.delta = 1;
  config.basis = TimeBasisConfig(BasisFamily::kFourierCosine, 5);
  SoftmaxLinearPolicy policy(5, 1);
  const EpisodeLog log =
      RunFor(AgentKind::kProWls, env, 10, 3, policy, nullptr, &config);
  EXPECT_EQ(log.stats.skipped_updates, 4);
  EXPECT_EQ(log.stats.updates, 6);
  EXPECT_EQ(log.stats.min_episodes_read, 5);
}

TEST(RunAgentTest, TrailingPartialBatchHasNoUpdate) {
  const RecommenderEnv env{RecommenderConfig{}};
  SoftmaxLinearPolicy policy(5, 1);
  ReplayBuffer buffer(1);
  const EpisodeLog log = RunFor(AgentKind::kFtrlPg, env, 10, 4, policy, &buffer);
  EXPECT_EQ(log.episodes.size(), 10u);
  EXPECT_EQ(buffer.size(), 10);
  EXPECT_EQ(log.stats.updates, 3);
}

TEST(RunAgentTest, RejectsMismatchedInputs) {
  const RecommenderEnv env{RecommenderConfig{}};
  SoftmaxLinearPolicy wrong(4, 1);
  EXPECT_THROW(RunFor(AgentKind::kOnpg, env, 10, 1, wrong), DimensionError);
  SoftmaxLinearPolicy policy(5, 1);
  EXPECT_THROW(RunFor(AgentKind::kOnpg, env, 0, 1, policy), DomainError);
  ReplayBuffer used(1);
  Trajectory traj(1, 1);
  traj.AddStep(Vector::Ones(1), 0, 1.0, 0.0);
  used.Insert(traj);
  EXPECT_THROW(RunFor(AgentKind::kOnpg, env, 5, 1, policy, &used), DomainError);
}

TEST(RunAgentTest, EveryAgentBeatsUniformWhenStationary) {
  RecommenderConfig rc;
  rc.speed = 0;
  const RecommenderEnv env(rc);
  double uniform = 0.0;
  for (int i = 0; i < 5; ++i) uniform += env.MeanReward(i, 1) / 5;
  for (AgentKind kind : kAllAgents) {
    AgentConfig config = DefaultAgentConfig(kind);
    config.lambda = 0.01;
    SoftmaxLinearPolicy policy(5, 1);
    const EpisodeLog log = RunFor(kind, env, 2000, 21, policy, nullptr, &config);
    double late = 0.0;
    for (int k = 1800; k < 2000; ++k) late += log.episodes[k].observed_return;
    late /= 200;
    EXPECT_GT(late, uniform) << AgentKindName(kind);
    // The entropy bonus keeps every action possible.
    EXPECT_GT(policy.ActionProbabilities(Vector::Ones(1)).minCoeff(), 1e-6)
        << AgentKindName(kind);
  }
}

}  // namespace
}  // namespace prognosticator
