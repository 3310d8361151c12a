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

#include "prognosticator/envs.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace prognosticator {
namespace {

std::string JoinDoubles(const std::vector<double>& values) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ';';
    out << values[i];
  }
  return out.str();
}

std::string FormatDouble(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

void CheckAction(int action, int num_actions) {
  if (action < 0 || action >= num_actions) {
    throw DomainError("action " + std::to_string(action) +
                      " outside [0, " + std::to_string(num_actions) + ")");
  }
}

void CheckEpisode(long episode) {
  if (episode < 1) throw DomainError("episode indices are 1-based");
}

}  // namespace

RecommenderEnv::RecommenderEnv(RecommenderConfig config)
    : config_(std::move(config)) {
  const std::size_t items = config_.amplitudes.size();
  if (items == 0 || config_.offsets.size() != items) {
    throw ConfigError("recommender needs matching amplitudes and offsets");
  }
  if (config_.phases.empty()) {
    for (std::size_t i = 0; i < items; ++i) {
      config_.phases.push_back(2.0 * std::numbers::pi * i / items);
    }
  }
  if (config_.phases.size() != items) {
    throw ConfigError("recommender phases must match the number of items");
  }
  if (config_.speed < 0) throw ConfigError("speed must be nonnegative");
  if (!(config_.period_base > 0.0)) {
    throw ConfigError("period_base must be positive");
  }
  if (config_.noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
}

double RecommenderEnv::MeanReward(int item, long episode) const {
  CheckAction(item, num_actions());
  const double angle = 2.0 * std::numbers::pi * config_.speed *
                           static_cast<double>(episode) / config_.period_base +
                       config_.phases[item];
  return config_.offsets[item] + config_.amplitudes[item] * std::sin(angle);
}

double RecommenderEnv::OptimalExpectedReturn(long episode) const {
  double best = MeanReward(0, episode);
  for (int i = 1; i < num_actions(); ++i) {
    best = std::max(best, MeanReward(i, episode));
  }
  return best;
}

Vector RecommenderEnv::Reset(long episode, Rng& /*rng*/) const {
  CheckEpisode(episode);
  return Vector::Ones(1);
}

StepResult RecommenderEnv::Step(const Vector& /*state*/, int action, int /*t*/,
                                long episode, Rng& rng) const {
  CheckAction(action, num_actions());
  StepResult result;
  result.next_state = Vector::Ones(1);
  result.reward = MeanReward(action, episode);
  if (config_.noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, config_.noise_std);
    result.reward += noise(rng);
  }
  result.done = true;
  return result;
}

std::optional<double> RecommenderEnv::ExpectedReturn(const Policy& policy,
                                                     long episode) const {
  const Vector probs = policy.ActionProbabilities(Vector::Ones(1));
  double value = 0.0;
  for (int i = 0; i < num_actions(); ++i) {
    value += probs(i) * MeanReward(i, episode);
  }
  return value;
}

ParameterList RecommenderEnv::Describe() const {
  return {{"env.name", "recommender"},
          {"env.speed", std::to_string(config_.speed)},
          {"env.amplitudes", JoinDoubles(config_.amplitudes)},
          {"env.offsets", JoinDoubles(config_.offsets)},
          {"env.phases", JoinDoubles(config_.phases)},
          {"env.period_base", FormatDouble(config_.period_base)},
          {"env.noise_std", FormatDouble(config_.noise_std)}};
}

GoalReacherEnv::GoalReacherEnv(GoalReacherConfig config) : config_(config) {
  if (config_.speed < 0) throw ConfigError("speed must be nonnegative");
  if (!(config_.step_size > 0.0) || !(config_.reach_radius > 0.0)) {
    throw ConfigError("goal reacher step size and radius must be positive");
  }
  if (!(config_.period_base > 0.0)) {
    throw ConfigError("period_base must be positive");
  }
}

std::array<double, 2> GoalReacherEnv::GoalPosition(long episode) const {
  const double omega = 2.0 * std::numbers::pi / config_.period_base;
  const double angle = config_.initial_angle +
                       config_.speed * omega * static_cast<double>(episode);
  return {config_.goal_radius * std::cos(angle),
          config_.goal_radius * std::sin(angle)};
}

Vector GoalReacherEnv::Observe(double x, double y, long episode) const {
  Vector obs(state_dim());
  obs(0) = x;
  obs(1) = y;
  if (config_.observe_goal) {
    const auto goal = GoalPosition(episode);
    obs(2) = goal[0];
    obs(3) = goal[1];
  }
  return obs;
}

Vector GoalReacherEnv::Reset(long episode, Rng& /*rng*/) const {
  CheckEpisode(episode);
  return Observe(0.0, 0.0, episode);
}

StepResult GoalReacherEnv::Step(const Vector& state, int action, int t,
                                long episode, Rng& /*rng*/) const {
  CheckAction(action, num_actions());
  double x = state(0);
  double y = state(1);
  switch (action) {
    case kLeft:
      x -= config_.step_size;
      break;
    case kRight:
      x += config_.step_size;
      break;
    case kUp:
      y += config_.step_size;
      break;
    case kDown:
      y -= config_.step_size;
      break;
  }
  x = std::clamp(x, -1.0, 1.0);
  y = std::clamp(y, -1.0, 1.0);
  const auto goal = GoalPosition(episode);
  StepResult result;
  result.next_state = Observe(x, y, episode);
  if (std::hypot(x - goal[0], y - goal[1]) <= config_.reach_radius) {
    result.reward = config_.reach_reward;
    result.done = true;
  } else {
    result.reward = config_.step_penalty;
    result.done = t + 1 >= kHorizon;
  }
  return result;
}

ParameterList GoalReacherEnv::Describe() const {
  return {{"env.name", "goal_reacher"},
          {"env.speed", std::to_string(config_.speed)},
          {"env.step_size", FormatDouble(config_.step_size)},
          {"env.reach_radius", FormatDouble(config_.reach_radius)},
          {"env.goal_radius", FormatDouble(config_.goal_radius)},
          {"env.initial_angle", FormatDouble(config_.initial_angle)},
          {"env.period_base", FormatDouble(config_.period_base)},
          {"env.reach_reward", FormatDouble(config_.reach_reward)},
          {"env.step_penalty", FormatDouble(config_.step_penalty)},
          {"env.observe_goal", config_.observe_goal ? "true" : "false"}};
}

Vector TwoStateMdp::OneHot(int s) {
  Vector v = Vector::Zero(2);
  v(s) = 1.0;
  return v;
}

Vector TwoStateMdp::Reset(long episode, Rng& /*rng*/) const {
  CheckEpisode(episode);
  return OneHot(0);
}

StepResult TwoStateMdp::Step(const Vector& state, int action, int t,
                             long /*episode*/, Rng& rng) const {
  CheckAction(action, 2);
  const int s = state(1) > 0.5 ? 1 : 0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int next = uniform(rng) < kToStateOne[s][action] ? 1 : 0;
  return {OneHot(next), kReward[s][action], t + 1 >= horizon()};
}

ParameterList TwoStateMdp::Describe() const {
  return {{"env.name", "two_state"}};
}

double TwoStateMdp::ExactValue(const Policy& policy, double gamma) const {
  const Vector pi0 = policy.ActionProbabilities(OneHot(0));
  const Vector pi1 = policy.ActionProbabilities(OneHot(1));
  const Vector* pi[2] = {&pi0, &pi1};
  // Each path is (a0, s1, a1, s2, a2) with s0 = 0: 2^5 paths.
  double value = 0.0;
  for (int code = 0; code < 32; ++code) {
    const int a0 = code & 1;
    const int s1 = (code >> 1) & 1;
    const int a1 = (code >> 2) & 1;
    const int s2 = (code >> 3) & 1;
    const int a2 = (code >> 4) & 1;
    const int states[3] = {0, s1, s2};
    const int actions[3] = {a0, a1, a2};
    double prob = 1.0;
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < 3; ++t) {
      const int s = states[t];
      const int a = actions[t];
      prob *= (*pi[s])(a);
      ret += discount * kReward[s][a];
      discount *= gamma;
      if (t < 2) {
        const double p1 = kToStateOne[s][a];
        prob *= states[t + 1] == 1 ? p1 : 1.0 - p1;
      }
    }
    value += prob * ret;
  }
  return value;
}

}  // namespace prognosticator
