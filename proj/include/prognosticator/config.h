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


// Experiment configuration read from flat "key = value" text. Lines starting
// with '#' and blank lines are ignored. List values are comma separated.
// Every key must be known; see README.md for the full list.

#ifndef PROGNOSTICATOR_CONFIG_H_
#define PROGNOSTICATOR_CONFIG_H_

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prognosticator/agents.h"
#include "prognosticator/envs.h"
#include "prognosticator/policy.h"

namespace prognosticator {

// Ordered key/value pairs as written. Throws ConfigError on malformed lines
// or repeated keys.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig Parse(std::istream& in,
                              std::string_view source = "<config>");
  static KeyValueConfig ParseString(std::string_view text);
  // Throws IoError if the file cannot be read.
  static KeyValueConfig Load(const std::string& path);

  // Overwrites an existing value.
  void Set(const std::string& key, const std::string& value);
  void Erase(const std::string& key) { values_.erase(key); }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class EnvKind { kRecommender, kGoalReacher };
std::string_view EnvKindName(EnvKind kind);
EnvKind ParseEnvKind(std::string_view name);

enum class PolicyFamily { kSoftmaxLinear, kMlp };
std::string_view PolicyFamilyName(PolicyFamily family);
PolicyFamily ParsePolicyFamily(std::string_view name);

struct EnvSpec {
  EnvKind kind = EnvKind::kRecommender;
  RecommenderConfig recommender;
  GoalReacherConfig goal_reacher;

  std::unique_ptr<Environment> Make(int speed) const;
};

struct PolicySpec {
  // Unset means softmax-linear for the recommender and an MLP for the goal
  // reacher.
  std::optional<PolicyFamily> family;
  int hidden_dim = 16;

  PolicyFamily ResolveFamily(EnvKind env) const;
  std::unique_ptr<Policy> Make(EnvKind env, const Environment& instance,
                               Rng& rng) const;
};

// Hyperparameter grid for the sweep command. Empty lists keep the base value.
struct SweepSpec {
  std::vector<double> eta;
  std::vector<double> lambda;
  std::vector<int> delta;
  std::vector<int> inner_iterations;
  std::vector<double> clip;
  std::vector<int> basis_dimension;

  std::size_t size() const;
};

struct ExperimentConfig {
  EnvSpec env;
  PolicySpec policy;
  std::vector<int> speeds{0, 1, 2, 3, 4};
  std::vector<AgentKind> agents{AgentKind::kProOls, AgentKind::kProWls,
                                AgentKind::kOnpg, AgentKind::kFtrlPg};
  // Hyperparameters per agent kind, defaults plus overrides.
  std::map<AgentKind, AgentConfig> agent_configs;
  int episodes = 2000;
  int seeds = 10;
  std::uint64_t base_seed = 0;
  std::string output_dir = "results";
  // 0 means one per hardware thread.
  int threads = 0;
  bool write_trajectories = false;
  SweepSpec sweep;

  const AgentConfig& agent(AgentKind kind) const;
  // Throws ConfigError on inconsistent settings.
  void Validate() const;
  // Every setting as "key = value" pairs, in a fixed order.
  std::vector<std::pair<std::string, std::string>> Echo() const;
};

// Default configuration for the named environment.
ExperimentConfig DefaultExperimentConfig(EnvKind env = EnvKind::kRecommender);

// Applies `values` on top of the defaults for the environment they name.
// Throws ConfigError on unknown keys or unparsable values.
ExperimentConfig ParseExperimentConfig(const KeyValueConfig& values);

// Value parsing helpers shared with the command line.
double ParseDouble(std::string_view key, std::string_view text);
long ParseInteger(std::string_view key, std::string_view text);
bool ParseBool(std::string_view key, std::string_view text);
std::vector<std::string> SplitList(std::string_view text);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_CONFIG_H_
