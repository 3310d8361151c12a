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

// Episodic environments whose dynamics drift between episodes according to
// a fixed schedule in the episode index. The schedule never depends on the
// agent's actions, and speed 0 is stationary.

#ifndef PROGNOSTICATOR_ENVS_H_
#define PROGNOSTICATOR_ENVS_H_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prognosticator/linalg.h"
#include "prognosticator/policy.h"

namespace prognosticator {

struct StepResult {
  Vector next_state;
  double reward = 0.0;
  bool done = false;
};

using ParameterList = std::vector<std::pair<std::string, std::string>>;

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual int state_dim() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;
  virtual int speed() const = 0;

  virtual Vector Reset(long episode, Rng& rng) const = 0;
  // `t` is the 0-based step within the episode. Throws DomainError on an
  // invalid action.
  virtual StepResult Step(const Vector& state, int action, int t, long episode,
                          Rng& rng) const = 0;

  // Exact expected return of `policy` during `episode`, when the simulator
  // knows it.
  virtual std::optional<double> ExpectedReturn(const Policy& /*policy*/,
                                               long /*episode*/) const {
    return std::nullopt;
  }

  // Schedule constants, echoed into result headers.
  virtual ParameterList Describe() const = 0;
};

struct RecommenderConfig {
  std::vector<double> amplitudes{0.3, 0.5, 0.2, 0.4, 0.6};
  std::vector<double> offsets{0.5, 0.4, 0.6, 0.5, 0.3};
  // Empty means evenly spaced 2 pi i / num_items.
  std::vector<double> phases;
  double period_base = 2000.0;
  double noise_std = 0.1;
  int speed = 0;
};

// One-step bandit over items whose mean rewards follow
// offset_i + amplitude_i sin(2 pi speed k / period_base + phase_i).
class RecommenderEnv final : public Environment {
 public:
  explicit RecommenderEnv(RecommenderConfig config = {});

  std::string_view name() const override { return "recommender"; }
  int state_dim() const override { return 1; }
  int num_actions() const override {
    return static_cast<int>(config_.amplitudes.size());
  }
  int horizon() const override { return 1; }
  int speed() const override { return config_.speed; }

  Vector Reset(long episode, Rng& rng) const override;
  StepResult Step(const Vector& state, int action, int t, long episode,
                  Rng& rng) const override;
  std::optional<double> ExpectedReturn(const Policy& policy,
                                       long episode) const override;
  ParameterList Describe() const override;

  double MeanReward(int item, long episode) const;
  double OptimalExpectedReturn(long episode) const;
  const RecommenderConfig& config() const { return config_; }

 private:
  RecommenderConfig config_;
};

struct GoalReacherConfig {
  double step_size = 0.2;
  double reach_radius = 0.15;
  double goal_radius = 0.5;
  double initial_angle = 0.0;
  double period_base = 2000.0;  // omega = 2 pi / period_base per unit speed
  double reach_reward = 1.0;
  double step_penalty = -0.05;
  // Whether the observation includes the goal position.
  bool observe_goal = false;
  int speed = 0;
};

// Agent starts at the origin of [-1, 1]^2 and moves step_size left, right,
// up or down. The goal circles the origin; an episode ends on reaching it or
// after 15 steps.
class GoalReacherEnv final : public Environment {
 public:
  static constexpr int kHorizon = 15;
  enum Action { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

  explicit GoalReacherEnv(GoalReacherConfig config = {});

  std::string_view name() const override { return "goal_reacher"; }
  int state_dim() const override { return config_.observe_goal ? 4 : 2; }
  int num_actions() const override { return 4; }
  int horizon() const override { return kHorizon; }
  int speed() const override { return config_.speed; }

  Vector Reset(long episode, Rng& rng) const override;
  StepResult Step(const Vector& state, int action, int t, long episode,
                  Rng& rng) const override;
  ParameterList Describe() const override;

  std::array<double, 2> GoalPosition(long episode) const;
  const GoalReacherConfig& config() const { return config_; }

 private:
  Vector Observe(double x, double y, long episode) const;

  GoalReacherConfig config_;
};

// Stationary two-state, two-action MDP with a three-step horizon. States are
// observed one-hot. Used to check estimator properties against the exact
// value of a policy.
class TwoStateMdp final : public Environment {
 public:
  TwoStateMdp() = default;

  std::string_view name() const override { return "two_state"; }
  int state_dim() const override { return 2; }
  int num_actions() const override { return 2; }
  int horizon() const override { return 3; }
  int speed() const override { return 0; }

  Vector Reset(long episode, Rng& rng) const override;
  StepResult Step(const Vector& state, int action, int t, long episode,
                  Rng& rng) const override;
  ParameterList Describe() const override;

  // Exact J(pi) by enumerating every state/action path.
  double ExactValue(const Policy& policy, double gamma) const;

  // P(next state = 1 | s, a) and r(s, a).
  static constexpr double kToStateOne[2][2] = {{0.2, 0.8}, {0.6, 0.3}};
  static constexpr double kReward[2][2] = {{1.0, 0.0}, {0.5, 2.0}};

 private:
  static Vector OneHot(int s);
};

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_ENVS_H_
