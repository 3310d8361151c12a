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


#include "prognosticator/config.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "prognosticator/errors.h"

namespace prognosticator {
namespace {

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& items, F format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += format(items[i]);
  }
  return out;
}

std::vector<double> ParseDoubleList(std::string_view key,
                                    std::string_view text) {
  std::vector<double> out;
  for (const std::string& item : SplitList(text)) {
    out.push_back(ParseDouble(key, item));
  }
  return out;
}

std::vector<int> ParseIntList(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (const std::string& item : SplitList(text)) {
    out.push_back(static_cast<int>(ParseInteger(key, item)));
  }
  return out;
}

std::optional<double> ParseClip(std::string_view key, std::string_view text) {
  if (text == "none" || text == "off") return std::nullopt;
  return ParseDouble(key, text);
}

std::string ClipString(const std::optional<double>& clip) {
  return clip ? FormatDouble(*clip) : "none";
}

const std::vector<AgentKind>& AllAgents() {
  static const std::vector<AgentKind> kAll = {
      AgentKind::kProOls, AgentKind::kProWls, AgentKind::kOnpg,
      AgentKind::kFtrlPg};
  return kAll;
}

// Applies one agent hyperparameter. Returns false if `field` is unknown.
bool ApplyAgentField(AgentConfig& config, std::string_view key,
                     std::string_view field, std::string_view value) {
  if (field == "eta") {
    config.eta = ParseDouble(key, value);
  } else if (field == "lambda") {
    config.lambda = ParseDouble(key, value);
  } else if (field == "delta") {
    config.delta = static_cast<int>(ParseInteger(key, value));
  } else if (field == "inner_iterations") {
    config.inner_iterations = static_cast<int>(ParseInteger(key, value));
  } else if (field == "clip") {
    config.clip = ParseClip(key, value);
  } else if (field == "gamma") {
    config.gamma = ParseDouble(key, value);
  } else if (field == "basis.family" || field == "basis.d") {
    if (!config.basis) {
      throw ConfigError("'" + std::string(key) +
                        "': agent takes no time basis");
    }
    if (field == "basis.family") {
      config.basis = TimeBasisConfig(ParseBasisFamily(value),
                                     config.basis->dimension());
    } else {
      config.basis = TimeBasisConfig(
          config.basis->family(),
          static_cast<int>(ParseInteger(key, value)));
    }
  } else {
    return false;
  }
  return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::istream& in,
                                     std::string_view source) {
  KeyValueConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto eq = trimmed.find('=');
    const std::string where =
        std::string(source) + ":" + std::to_string(line_number);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (config.Has(key)) {
      throw ConfigError(where + ": key '" + key + "' given twice");
    }
    config.values_[key] = value;
  }
  return config;
}

KeyValueConfig KeyValueConfig::ParseString(std::string_view text) {
  std::istringstream in{std::string(text)};
  return Parse(in);
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  return Parse(in, path);
}

void KeyValueConfig::Set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::optional<std::string> KeyValueConfig::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ParseDouble(std::string_view key, std::string_view text) {
  const std::string s = Trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ConfigError("'" + std::string(key) + "': '" + s +
                      "' is not a finite number");
  }
  return v;
}

long ParseInteger(std::string_view key, std::string_view text) {
  const std::string s = Trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "': '" + s +
                      "' is not an integer");
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view text) {
  const std::string s = Trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("'" + std::string(key) + "': '" + s +
                    "' is not a boolean");
}

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto stop = comma == std::string_view::npos ? text.size() : comma;
    std::string item = Trim(text.substr(start, stop - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view EnvKindName(EnvKind kind) {
  return kind == EnvKind::kRecommender ? "recommender" : "goal_reacher";
}

EnvKind ParseEnvKind(std::string_view name) {
  if (name == "recommender") return EnvKind::kRecommender;
  if (name == "goal_reacher" || name == "goal-reacher") {
    return EnvKind::kGoalReacher;
  }
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

std::string_view PolicyFamilyName(PolicyFamily family) {
  return family == PolicyFamily::kSoftmaxLinear ? "softmax_linear" : "mlp";
}

PolicyFamily ParsePolicyFamily(std::string_view name) {
  if (name == "softmax_linear" || name == "linear") {
    return PolicyFamily::kSoftmaxLinear;
  }
  if (name == "mlp") return PolicyFamily::kMlp;
  throw ConfigError("unknown policy family '" + std::string(name) + "'");
}

std::unique_ptr<Environment> EnvSpec::Make(int speed) const {
  if (kind == EnvKind::kRecommender) {
    RecommenderConfig c = recommender;
    c.speed = speed;
    return std::make_unique<RecommenderEnv>(c);
  }
  GoalReacherConfig c = goal_reacher;
  c.speed = speed;
  return std::make_unique<GoalReacherEnv>(c);
}

PolicyFamily PolicySpec::ResolveFamily(EnvKind env) const {
  if (family) return *family;
  return env == EnvKind::kRecommender ? PolicyFamily::kSoftmaxLinear
                                      : PolicyFamily::kMlp;
}

std::unique_ptr<Policy> PolicySpec::Make(EnvKind env,
                                         const Environment& instance,
                                         Rng& rng) const {
  if (ResolveFamily(env) == PolicyFamily::kSoftmaxLinear) {
    return std::make_unique<SoftmaxLinearPolicy>(instance.num_actions(),
                                                 instance.state_dim());
  }
  return std::make_unique<MlpSoftmaxPolicy>(
      instance.state_dim(), hidden_dim, instance.num_actions(), rng);
}

std::size_t SweepSpec::size() const {
  std::size_t n = 1;
  for (std::size_t m : {eta.size(), lambda.size(), delta.size(),
                        inner_iterations.size(), clip.size(),
                        basis_dimension.size()}) {
    n *= std::max<std::size_t>(m, 1);
  }
  return n;
}

const AgentConfig& ExperimentConfig::agent(AgentKind kind) const {
  const auto it = agent_configs.find(kind);
  if (it == agent_configs.end()) {
    throw ConfigError("no configuration for agent " +
                      std::string(AgentKindName(kind)));
  }
  return it->second;
}

void ExperimentConfig::Validate() const {
  if (speeds.empty()) throw ConfigError("experiment.speeds is empty");
  for (int s : speeds) {
    if (s < 0) throw ConfigError("speeds must be nonnegative");
  }
  if (agents.empty()) throw ConfigError("experiment.agents is empty");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (agents[i] == agents[j]) {
        throw ConfigError("agent " + std::string(AgentKindName(agents[i])) +
                          " listed twice");
      }
    }
    agent(agents[i]).Validate();
  }
  if (episodes < 1) throw ConfigError("experiment.episodes must be positive");
  if (seeds < 1) throw ConfigError("experiment.seeds must be positive");
  if (threads < 0) throw ConfigError("experiment.threads must be >= 0");
  if (policy.hidden_dim < 1) {
    throw ConfigError("policy.hidden_dim must be positive");
  }
  if (output_dir.empty()) throw ConfigError("experiment.output_dir is empty");
  // Constructing the environment checks its constants.
  env.Make(0);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::Echo()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  auto put = [&out](std::string key, std::string value) {
    out.emplace_back(std::move(key), std::move(value));
  };
  put("env.name", std::string(EnvKindName(env.kind)));
  if (env.kind == EnvKind::kRecommender) {
    const RecommenderConfig& r = env.recommender;
    put("env.recommender.amplitudes", JoinList(r.amplitudes, FormatDouble));
    put("env.recommender.offsets", JoinList(r.offsets, FormatDouble));
    put("env.recommender.phases",
        r.phases.empty() ? "even" : JoinList(r.phases, FormatDouble));
    put("env.recommender.period_base", FormatDouble(r.period_base));
    put("env.recommender.noise_std", FormatDouble(r.noise_std));
  } else {
    const GoalReacherConfig& g = env.goal_reacher;
    put("env.goal_reacher.step_size", FormatDouble(g.step_size));
    put("env.goal_reacher.reach_radius", FormatDouble(g.reach_radius));
    put("env.goal_reacher.goal_radius", FormatDouble(g.goal_radius));
    put("env.goal_reacher.initial_angle", FormatDouble(g.initial_angle));
    put("env.goal_reacher.period_base", FormatDouble(g.period_base));
    put("env.goal_reacher.reach_reward", FormatDouble(g.reach_reward));
    put("env.goal_reacher.step_penalty", FormatDouble(g.step_penalty));
    put("env.goal_reacher.observe_goal", g.observe_goal ? "true" : "false");
  }
  put("policy.family",
      std::string(PolicyFamilyName(policy.ResolveFamily(env.kind))));
  put("policy.hidden_dim", std::to_string(policy.hidden_dim));
  for (AgentKind kind : AllAgents()) {
    const auto it = agent_configs.find(kind);
    if (it == agent_configs.end()) continue;
    const AgentConfig& a = it->second;
    const std::string prefix =
        "agent." + std::string(AgentKindName(kind)) + ".";
    put(prefix + "eta", FormatDouble(a.eta));
    put(prefix + "lambda", FormatDouble(a.lambda));
    put(prefix + "delta", std::to_string(a.delta));
    put(prefix + "inner_iterations", std::to_string(a.inner_iterations));
    put(prefix + "clip", ClipString(a.clip));
    put(prefix + "gamma", FormatDouble(a.gamma));
    if (a.basis) {
      put(prefix + "basis.family",
          std::string(BasisFamilyName(a.basis->family())));
      put(prefix + "basis.d", std::to_string(a.basis->dimension()));
    }
  }
  put("wls.stop_gradient_weights",
      agent(AgentKind::kProWls).stop_gradient_weights ? "true" : "false");
  put("experiment.episodes", std::to_string(episodes));
  put("experiment.seeds", std::to_string(seeds));
  put("experiment.base_seed", std::to_string(base_seed));
  put("experiment.speeds",
      JoinList(speeds, [](int s) { return std::to_string(s); }));
  put("experiment.agents", JoinList(agents, [](AgentKind k) {
        return std::string(AgentKindName(k));
      }));
  put("experiment.output_dir", output_dir);
  put("experiment.write_trajectories", write_trajectories ? "true" : "false");
  return out;
}

ExperimentConfig DefaultExperimentConfig(EnvKind env) {
  ExperimentConfig config;
  config.env.kind = env;
  for (AgentKind kind : AllAgents()) {
    config.agent_configs[kind] = DefaultAgentConfig(kind);
  }
  return config;
}

ExperimentConfig ParseExperimentConfig(const KeyValueConfig& values) {
  EnvKind env_kind = EnvKind::kRecommender;
  if (auto name = values.Get("env.name")) env_kind = ParseEnvKind(*name);
  ExperimentConfig config = DefaultExperimentConfig(env_kind);
  RecommenderConfig& rec = config.env.recommender;
  GoalReacherConfig& goal = config.env.goal_reacher;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"env.name", [](const std::string&, const std::string&) {}},
      {"env.speed",
       [&](const std::string& k, const std::string& v) {
         if (values.Has("experiment.speeds")) {
           throw ConfigError("give env.speed or experiment.speeds, not both");
         }
         config.speeds = {static_cast<int>(ParseInteger(k, v))};
       }},
      {"env.recommender.amplitudes",
       [&](const std::string& k, const std::string& v) {
         rec.amplitudes = ParseDoubleList(k, v);
       }},
      {"env.recommender.offsets",
       [&](const std::string& k, const std::string& v) {
         rec.offsets = ParseDoubleList(k, v);
       }},
      {"env.recommender.phases",
       [&](const std::string& k, const std::string& v) {
         rec.phases = v == "even" ? std::vector<double>{}
                                  : ParseDoubleList(k, v);
       }},
      {"env.recommender.period_base",
       [&](const std::string& k, const std::string& v) {
         rec.period_base = ParseDouble(k, v);
       }},
      {"env.recommender.noise_std",
       [&](const std::string& k, const std::string& v) {
         rec.noise_std = ParseDouble(k, v);
       }},
      {"env.goal_reacher.step_size",
       [&](const std::string& k, const std::string& v) {
         goal.step_size = ParseDouble(k, v);
       }},
      {"env.goal_reacher.reach_radius",
       [&](const std::string& k, const std::string& v) {
         goal.reach_radius = ParseDouble(k, v);
       }},
      {"env.goal_reacher.goal_radius",
       [&](const std::string& k, const std::string& v) {
         goal.goal_radius = ParseDouble(k, v);
       }},
      {"env.goal_reacher.initial_angle",
       [&](const std::string& k, const std::string& v) {
         goal.initial_angle = ParseDouble(k, v);
       }},
      {"env.goal_reacher.period_base",
       [&](const std::string& k, const std::string& v) {
         goal.period_base = ParseDouble(k, v);
       }},
      {"env.goal_reacher.reach_reward",
       [&](const std::string& k, const std::string& v) {
         goal.reach_reward = ParseDouble(k, v);
       }},
      {"env.goal_reacher.step_penalty",
       [&](const std::string& k, const std::string& v) {
         goal.step_penalty = ParseDouble(k, v);
       }},
      {"env.goal_reacher.observe_goal",
       [&](const std::string& k, const std::string& v) {
         goal.observe_goal = ParseBool(k, v);
       }},
      {"policy.family",
       [&](const std::string&, const std::string& v) {
         config.policy.family = ParsePolicyFamily(v);
       }},
      {"policy.hidden_dim",
       [&](const std::string& k, const std::string& v) {
         config.policy.hidden_dim = static_cast<int>(ParseInteger(k, v));
       }},
      {"wls.stop_gradient_weights",
       [&](const std::string& k, const std::string& v) {
         config.agent_configs[AgentKind::kProWls].stop_gradient_weights =
             ParseBool(k, v);
       }},
      {"experiment.episodes",
       [&](const std::string& k, const std::string& v) {
         config.episodes = static_cast<int>(ParseInteger(k, v));
       }},
      {"experiment.seeds",
       [&](const std::string& k, const std::string& v) {
         config.seeds = static_cast<int>(ParseInteger(k, v));
       }},
      {"experiment.base_seed",
       [&](const std::string& k, const std::string& v) {
         const long seed = ParseInteger(k, v);
         if (seed < 0) throw ConfigError("experiment.base_seed must be >= 0");
         config.base_seed = static_cast<std::uint64_t>(seed);
       }},
      {"experiment.speeds",
       [&](const std::string& k, const std::string& v) {
         config.speeds = ParseIntList(k, v);
       }},
      {"experiment.agents",
       [&](const std::string&, const std::string& v) {
         config.agents.clear();
         for (const std::string& name : SplitList(v)) {
           config.agents.push_back(ParseAgentKind(name));
         }
       }},
      {"experiment.output_dir",
       [&](const std::string&, const std::string& v) {
         config.output_dir = v;
       }},
      {"experiment.threads",
       [&](const std::string& k, const std::string& v) {
         config.threads = static_cast<int>(ParseInteger(k, v));
       }},
      {"experiment.write_trajectories",
       [&](const std::string& k, const std::string& v) {
         config.write_trajectories = ParseBool(k, v);
       }},
      {"sweep.eta",
       [&](const std::string& k, const std::string& v) {
         config.sweep.eta = ParseDoubleList(k, v);
       }},
      {"sweep.lambda",
       [&](const std::string& k, const std::string& v) {
         config.sweep.lambda = ParseDoubleList(k, v);
       }},
      {"sweep.delta",
       [&](const std::string& k, const std::string& v) {
         config.sweep.delta = ParseIntList(k, v);
       }},
      {"sweep.inner_iterations",
       [&](const std::string& k, const std::string& v) {
         config.sweep.inner_iterations = ParseIntList(k, v);
       }},
      {"sweep.clip",
       [&](const std::string& k, const std::string& v) {
         config.sweep.clip = ParseDoubleList(k, v);
       }},
      {"sweep.basis_d",
       [&](const std::string& k, const std::string& v) {
         config.sweep.basis_dimension = ParseIntList(k, v);
       }},
  };

  // Agent settings apply in three passes so the result does not depend on
  // line order: shared basis, then all agents, then single agents.
  std::optional<BasisFamily> basis_family;
  std::optional<int> basis_dim;
  std::vector<std::pair<std::string, std::string>> shared_agent;
  std::vector<std::pair<std::string, std::string>> single_agent;
  for (const auto& [key, value] : values.values()) {
    if (key == "basis.family") {
      basis_family = ParseBasisFamily(value);
    } else if (key == "basis.d") {
      basis_dim = static_cast<int>(ParseInteger(key, value));
    } else if (key.rfind("agent.", 0) == 0) {
      const std::string rest = key.substr(6);
      const auto dot = rest.find('.');
      bool names_agent = false;
      if (dot != std::string::npos) {
        try {
          ParseAgentKind(rest.substr(0, dot));
          names_agent = true;
        } catch (const ConfigError&) {
        }
      }
      (names_agent ? single_agent : shared_agent).emplace_back(key, value);
    } else {
      const auto it = setters.find(key);
      if (it == setters.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      it->second(key, value);
    }
  }

  for (auto& [kind, agent] : config.agent_configs) {
    if (!agent.basis) continue;
    agent.basis = TimeBasisConfig(basis_family.value_or(agent.basis->family()),
                                  basis_dim.value_or(agent.basis->dimension()));
  }
  // A basis family change can reset the dimension (identity, constant), so
  // families go before dimensions.
  const auto family_first = [](const auto& a, const auto& b) {
    const auto is_family = [](const std::string& k) {
      return k.ends_with("basis.family");
    };
    return is_family(a.first) && !is_family(b.first);
  };
  std::stable_sort(shared_agent.begin(), shared_agent.end(), family_first);
  std::stable_sort(single_agent.begin(), single_agent.end(), family_first);
  for (const auto& [key, value] : shared_agent) {
    const std::string field = key.substr(6);
    for (auto& [kind, agent] : config.agent_configs) {
      if (field.rfind("basis.", 0) == 0 && !agent.is_forecasting()) continue;
      if (!ApplyAgentField(agent, key, field, value)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }
  for (const auto& [key, value] : single_agent) {
    const std::string rest = key.substr(6);
    const auto dot = rest.find('.');
    AgentKind kind;
    try {
      kind = ParseAgentKind(rest.substr(0, dot));
    } catch (const ConfigError&) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (!ApplyAgentField(config.agent_configs[kind], key,
                         rest.substr(dot + 1), value)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  config.Validate();
  return config;
}

}  // namespace prognosticator
