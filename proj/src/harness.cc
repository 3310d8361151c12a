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


#include "prognosticator/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "prognosticator/estimators.h"

#ifndef PROGNOSTICATOR_BUILD_ID
#define PROGNOSTICATOR_BUILD_ID "unknown"
#endif

namespace prognosticator {
namespace {

constexpr std::uint64_t kSeedStride = 1000;
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::uint64_t kAgentStream = 3;

std::string FormatNumber(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatNumber(*v) : "";
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double CsvDouble(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataCorruptionError("line " + std::to_string(line) + ": '" + text +
                              "' is not a number");
  }
}

long CsvInteger(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataCorruptionError("line " + std::to_string(line) + ": '" + text +
                              "' is not an integer");
  }
}

std::uint64_t CsvUnsigned(const std::string& text, int line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') {
      throw std::invalid_argument(text);
    }
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw DataCorruptionError("line " + std::to_string(line) + ": '" + text +
                              "' is not a seed");
  }
}

AgentKind CsvAgent(const std::string& text, int line) {
  try {
    return ParseAgentKind(text);
  } catch (const ConfigError&) {
    throw DataCorruptionError("line " + std::to_string(line) +
                              ": unknown agent '" + text + "'");
  }
}

void ExpectHeader(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw DataCorruptionError("expected header '" + header + "'");
  }
}

// Keeps first-seen order of values.
template <typename T>
void NoteOrder(std::vector<T>& order, const T& value) {
  if (std::find(order.begin(), order.end(), value) == order.end()) {
    order.push_back(value);
  }
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void CloseChecked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void CreateDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() +
                  "': " + ec.message());
  }
}

}  // namespace

TrialSeeds SeedsFor(std::uint64_t base_seed, int seed_index) {
  TrialSeeds seeds;
  seeds.trial = base_seed + kSeedStride * static_cast<std::uint64_t>(seed_index);
  seeds.env = seeds.trial + kEnvStream;
  seeds.policy = seeds.trial + kPolicyStream;
  seeds.agent = seeds.trial + kAgentStream;
  return seeds;
}

TrialResult RunTrial(const ExperimentConfig& config, AgentKind agent,
                     int speed, int seed_index, std::ostream* trajectory_log) {
  const TrialSeeds seeds = SeedsFor(config.base_seed, seed_index);
  const std::unique_ptr<Environment> env = config.env.Make(speed);
  Rng policy_rng(seeds.policy);
  Rng agent_rng(seeds.agent);
  Rng env_rng(seeds.env);
  const std::unique_ptr<Policy> policy =
      config.policy.Make(config.env.kind, *env, policy_rng);

  TrialResult result;
  result.agent = agent;
  result.speed = speed;
  result.seed_index = seed_index;
  result.seed = seeds.trial;
  ReplayBuffer buffer(env->state_dim());
  result.log = RunAgent(*env, config.agent(agent), *policy, config.episodes,
                        agent_rng, env_rng, &buffer);
  if (const auto* rec = dynamic_cast<const RecommenderEnv*>(env.get())) {
    result.optimal_returns.reserve(config.episodes);
    for (long k = 1; k <= config.episodes; ++k) {
      result.optimal_returns.push_back(rec->OptimalExpectedReturn(k));
    }
  }
  if (trajectory_log != nullptr) buffer.WriteLog(*trajectory_log);
  return result;
}

double NormalizedRegret(std::span<const double> optimal,
                        std::span<const double> achieved) {
  if (optimal.size() != achieved.size()) {
    throw DimensionError("regret needs one optimal value per episode");
  }
  double gap = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < optimal.size(); ++k) {
    gap += optimal[k] - achieved[k];
    total += optimal[k];
  }
  if (!(total > 0.0)) {
    throw DomainError("regret normalizer sum J* is not positive");
  }
  return gap / total;
}

double ComputeTrueRegret(const EpisodeLog& log, const Environment& env) {
  const auto* rec = dynamic_cast<const RecommenderEnv*>(&env);
  if (rec == nullptr) {
    throw UnsupportedError("true regret needs J*, which only the recommender "
                           "provides; use surrogate regret for " +
                           std::string(env.name()));
  }
  std::vector<double> optimal;
  std::vector<double> achieved;
  for (const EpisodeRecord& e : log.episodes) {
    if (!e.expected_return) {
      throw DomainError("episode log lacks expected returns");
    }
    optimal.push_back(rec->OptimalExpectedReturn(e.episode));
    achieved.push_back(*e.expected_return);
  }
  return NormalizedRegret(optimal, achieved);
}

std::vector<double> ComputeSurrogateRegret(
    const std::vector<std::vector<double>>& returns) {
  if (returns.size() < 2) {
    throw AlignmentError("surrogate regret compares at least two agents");
  }
  const std::size_t n = returns.front().size();
  for (const auto& r : returns) {
    if (r.size() != n) {
      throw AlignmentError("agents' episode logs differ in length");
    }
  }
  std::vector<double> best(n);
  for (std::size_t k = 0; k < n; ++k) {
    best[k] = returns.front()[k];
    for (const auto& r : returns) best[k] = std::max(best[k], r[k]);
  }
  std::vector<double> out;
  out.reserve(returns.size());
  for (const auto& r : returns) out.push_back(NormalizedRegret(best, r));
  return out;
}

std::string_view RegretMetricName(RegretMetric metric) {
  return metric == RegretMetric::kTrue ? "true" : "surrogate";
}

const RegretRow& RegretTable::Find(AgentKind agent, int speed,
                                   RegretMetric metric) const {
  for (const RegretRow& row : rows) {
    if (row.agent == agent && row.speed == speed && row.metric == metric) {
      return row;
    }
  }
  throw DomainError("no " + std::string(RegretMetricName(metric)) +
                    " regret for " + std::string(AgentKindName(agent)) +
                    " at speed " + std::to_string(speed));
}

MeanAndError Summarize(std::span<const double> values) {
  MeanAndError out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<EpisodeRow> FlattenTrials(const std::vector<TrialResult>& trials) {
  std::vector<EpisodeRow> rows;
  for (const TrialResult& t : trials) {
    for (std::size_t i = 0; i < t.log.episodes.size(); ++i) {
      const EpisodeRecord& e = t.log.episodes[i];
      EpisodeRow row;
      row.episode = e.episode;
      row.agent = t.agent;
      row.speed = t.speed;
      row.seed = t.seed;
      row.observed_return = e.observed_return;
      row.expected_return = e.expected_return;
      if (i < t.optimal_returns.size()) {
        row.optimal_return = t.optimal_returns[i];
      }
      rows.push_back(row);
    }
  }
  return rows;
}

RegretTable ComputeRegretTable(const std::vector<EpisodeRow>& rows) {
  using Key = std::tuple<AgentKind, int, std::uint64_t>;
  std::vector<AgentKind> agents;
  std::vector<int> speeds;
  std::vector<std::uint64_t> seeds;
  std::map<Key, std::vector<const EpisodeRow*>> series;
  bool all_true = !rows.empty();
  for (const EpisodeRow& row : rows) {
    NoteOrder(agents, row.agent);
    NoteOrder(speeds, row.speed);
    NoteOrder(seeds, row.seed);
    series[{row.agent, row.speed, row.seed}].push_back(&row);
    all_true = all_true && row.expected_return && row.optimal_return;
  }
  for (auto& [key, episodes] : series) {
    std::stable_sort(episodes.begin(), episodes.end(),
                     [](const EpisodeRow* a, const EpisodeRow* b) {
                       return a->episode < b->episode;
                     });
  }

  RegretTable table;
  if (all_true) {
    for (AgentKind agent : agents) {
      for (int speed : speeds) {
        std::vector<double> values;
        for (std::uint64_t seed : seeds) {
          const auto it = series.find({agent, speed, seed});
          if (it == series.end()) continue;
          std::vector<double> optimal;
          std::vector<double> achieved;
          for (const EpisodeRow* e : it->second) {
            optimal.push_back(*e->optimal_return);
            achieved.push_back(*e->expected_return);
          }
          values.push_back(NormalizedRegret(optimal, achieved));
        }
        if (values.empty()) continue;
        const MeanAndError s = Summarize(values);
        table.rows.push_back(
            {agent, speed, s.mean, s.standard_error, RegretMetric::kTrue});
      }
    }
  }
  if (agents.size() >= 2) {
    std::map<std::pair<AgentKind, int>, std::vector<double>> values;
    for (int speed : speeds) {
      for (std::uint64_t seed : seeds) {
        std::vector<std::vector<double>> returns;
        for (AgentKind agent : agents) {
          const auto it = series.find({agent, speed, seed});
          if (it == series.end()) {
            throw AlignmentError("agent " + std::string(AgentKindName(agent)) +
                                 " has no episodes for speed " +
                                 std::to_string(speed) + ", seed " +
                                 std::to_string(seed));
          }
          std::vector<double> r;
          for (const EpisodeRow* e : it->second) {
            r.push_back(e->expected_return.value_or(e->observed_return));
          }
          returns.push_back(std::move(r));
        }
        const std::vector<double> regret = ComputeSurrogateRegret(returns);
        for (std::size_t a = 0; a < agents.size(); ++a) {
          values[{agents[a], speed}].push_back(regret[a]);
        }
      }
    }
    for (AgentKind agent : agents) {
      for (int speed : speeds) {
        const MeanAndError s = Summarize(values[{agent, speed}]);
        table.rows.push_back({agent, speed, s.mean, s.standard_error,
                              RegretMetric::kSurrogate});
      }
    }
  }
  return table;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  struct Job {
    AgentKind agent;
    int speed;
    int seed_index;
  };
  std::vector<Job> jobs;
  for (AgentKind agent : config.agents) {
    for (int speed : config.speeds) {
      for (int s = 0; s < config.seeds; ++s) jobs.push_back({agent, speed, s});
    }
  }

  const bool dump = config.write_trajectories;
  std::vector<TrialResult> results(jobs.size());
  std::vector<std::string> dumps(dump ? jobs.size() : 0);
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        std::ostringstream log;
        results[i] = RunTrial(config, jobs[i].agent, jobs[i].speed,
                              jobs[i].seed_index, dump ? &log : nullptr);
        if (dump) dumps[i] = log.str();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = config.threads;
  if (threads == 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min<int>(threads, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw Error("trial " + std::string(AgentKindName(jobs[i].agent)) +
                " speed " + std::to_string(jobs[i].speed) + " seed " +
                std::to_string(SeedsFor(config.base_seed, jobs[i].seed_index)
                                   .trial) +
                " failed: " + what);
  }

  ExperimentResult out;
  out.regret = ComputeRegretTable(FlattenTrials(results));
  out.trials = std::move(results);
  if (dump) {
    std::filesystem::path dir =
        std::filesystem::path(config.output_dir) / "trajectories";
    CreateDirectory(dir);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const std::filesystem::path path =
          dir / (std::string(AgentKindName(jobs[i].agent)) + "_speed" +
                 std::to_string(jobs[i].speed) + "_seed" +
                 std::to_string(out.trials[i].seed) + ".csv");
      std::ofstream f = OpenForWrite(path);
      f << dumps[i];
      CloseChecked(f, path);
    }
  }
  return out;
}

ExperimentResult RunAndWriteExperiment(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  CreateDirectory(dir);
  ExperimentResult result = RunExperiment(config);
  {
    const auto path = dir / "episodes.csv";
    std::ofstream out = OpenForWrite(path);
    WriteEpisodesCsv(FlattenTrials(result.trials), out);
    CloseChecked(out, path);
  }
  {
    const auto path = dir / "regret.csv";
    std::ofstream out = OpenForWrite(path);
    WriteRegretCsv(result.regret, out);
    CloseChecked(out, path);
  }
  {
    const auto path = dir / "meta.txt";
    std::ofstream out = OpenForWrite(path);
    WriteMeta(config, out);
    CloseChecked(out, path);
  }
  return result;
}

void WriteEpisodesCsv(const std::vector<EpisodeRow>& rows, std::ostream& out) {
  out << "episode,agent,speed,seed,return,expected_return,optimal_return\n";
  for (const EpisodeRow& r : rows) {
    out << r.episode << ',' << AgentKindName(r.agent) << ',' << r.speed << ','
        << r.seed << ',' << FormatNumber(r.observed_return) << ','
        << FormatOptional(r.expected_return) << ','
        << FormatOptional(r.optimal_return) << '\n';
  }
}

void WriteRegretCsv(const RegretTable& table, std::ostream& out) {
  out << "agent,speed,regret_mean,regret_se,metric_kind\n";
  for (const RegretRow& r : table.rows) {
    out << AgentKindName(r.agent) << ',' << r.speed << ','
        << FormatNumber(r.mean) << ',' << FormatNumber(r.standard_error) << ','
        << RegretMetricName(r.metric) << '\n';
  }
}

void WriteMeta(const ExperimentConfig& config, std::ostream& out) {
  out << "# prognosticator experiment\n";
  out << "# build: " << BuildIdentifier() << '\n';
  std::unique_ptr<Environment> env = config.env.Make(0);
  for (const auto& [key, value] : env->Describe()) {
    out << "# env " << key << ": " << value << '\n';
  }
  for (const auto& [key, value] : config.Echo()) {
    out << key << " = " << value << '\n';
  }
}

std::vector<EpisodeRow> ReadEpisodesCsv(std::istream& in) {
  ExpectHeader(in,
               "episode,agent,speed,seed,return,expected_return,"
               "optimal_return");
  std::vector<EpisodeRow> rows;
  std::string line;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 7) {
      throw DataCorruptionError("line " + std::to_string(n) +
                                ": expected 7 fields");
    }
    EpisodeRow row;
    row.episode = CsvInteger(f[0], n);
    row.agent = CsvAgent(f[1], n);
    row.speed = static_cast<int>(CsvInteger(f[2], n));
    row.seed = CsvUnsigned(f[3], n);
    row.observed_return = CsvDouble(f[4], n);
    if (!f[5].empty()) row.expected_return = CsvDouble(f[5], n);
    if (!f[6].empty()) row.optimal_return = CsvDouble(f[6], n);
    rows.push_back(row);
  }
  return rows;
}

RegretTable ReadRegretCsv(std::istream& in) {
  ExpectHeader(in, "agent,speed,regret_mean,regret_se,metric_kind");
  RegretTable table;
  std::string line;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 5) {
      throw DataCorruptionError("line " + std::to_string(n) +
                                ": expected 5 fields");
    }
    RegretRow row;
    row.agent = CsvAgent(f[0], n);
    row.speed = static_cast<int>(CsvInteger(f[1], n));
    row.mean = CsvDouble(f[2], n);
    row.standard_error = CsvDouble(f[3], n);
    if (f[4] == "true") {
      row.metric = RegretMetric::kTrue;
    } else if (f[4] == "surrogate") {
      row.metric = RegretMetric::kSurrogate;
    } else {
      throw DataCorruptionError("line " + std::to_string(n) +
                                ": unknown metric '" + f[4] + "'");
    }
    table.rows.push_back(row);
  }
  return table;
}

std::vector<SweepPoint> ExpandSweep(const ExperimentConfig& base) {
  const SweepSpec& s = base.sweep;
  auto or_base = [](const auto& list, auto value) {
    using T = decltype(value);
    return list.empty() ? std::vector<T>{value} : std::vector<T>(list);
  };
  const AgentConfig& ref = base.agent(base.agents.front());
  const std::vector<double> etas = or_base(s.eta, ref.eta);
  const std::vector<double> lambdas = or_base(s.lambda, ref.lambda);
  const std::vector<int> deltas = or_base(s.delta, ref.delta);
  const std::vector<int> inners = or_base(s.inner_iterations,
                                          ref.inner_iterations);
  const std::vector<double> clips =
      or_base(s.clip, ref.clip.value_or(0.0));
  const std::vector<int> dims = or_base(s.basis_dimension, 0);

  std::vector<SweepPoint> points;
  for (double eta : etas) {
    for (double lambda : lambdas) {
      for (int delta : deltas) {
        for (int inner : inners) {
          for (double clip : clips) {
            for (int d : dims) {
              SweepPoint p;
              p.index = static_cast<int>(points.size());
              p.config = base;
              p.config.sweep = {};
              for (auto& [kind, agent] : p.config.agent_configs) {
                if (!s.eta.empty()) agent.eta = eta;
                if (!s.lambda.empty()) agent.lambda = lambda;
                if (!s.delta.empty()) agent.delta = delta;
                if (!s.inner_iterations.empty()) {
                  agent.inner_iterations = inner;
                }
                if (!s.clip.empty()) agent.clip = clip;
                if (!s.basis_dimension.empty() && agent.basis) {
                  agent.basis = TimeBasisConfig(agent.basis->family(), d);
                }
              }
              if (!s.eta.empty()) p.settings.emplace_back("eta", FormatNumber(eta));
              if (!s.lambda.empty()) {
                p.settings.emplace_back("lambda", FormatNumber(lambda));
              }
              if (!s.delta.empty()) {
                p.settings.emplace_back("delta", std::to_string(delta));
              }
              if (!s.inner_iterations.empty()) {
                p.settings.emplace_back("inner_iterations",
                                        std::to_string(inner));
              }
              if (!s.clip.empty()) {
                p.settings.emplace_back("clip", FormatNumber(clip));
              }
              if (!s.basis_dimension.empty()) {
                p.settings.emplace_back("basis_d", std::to_string(d));
              }
              p.config.output_dir =
                  (std::filesystem::path(base.output_dir) /
                   ("point_" + std::to_string(p.index)))
                      .string();
              p.config.Validate();
              points.push_back(std::move(p));
            }
          }
        }
      }
    }
  }
  return points;
}

void RunSweep(const ExperimentConfig& base) {
  const std::vector<SweepPoint> points = ExpandSweep(base);
  const std::filesystem::path dir(base.output_dir);
  CreateDirectory(dir);
  const auto path = dir / "sweep.csv";
  std::ofstream out = OpenForWrite(path);
  out << "point,settings,agent,speed,regret_mean,regret_se,metric_kind\n";
  for (const SweepPoint& p : points) {
    const ExperimentResult result = RunAndWriteExperiment(p.config);
    std::string settings;
    for (const auto& [key, value] : p.settings) {
      if (!settings.empty()) settings += ';';
      settings += key + "=" + value;
    }
    for (const RegretRow& r : result.regret.rows) {
      out << p.index << ',' << settings << ',' << AgentKindName(r.agent)
          << ',' << r.speed << ',' << FormatNumber(r.mean) << ','
          << FormatNumber(r.standard_error) << ','
          << RegretMetricName(r.metric) << '\n';
    }
  }
  CloseChecked(out, path);
}

std::string BuildIdentifier() { return PROGNOSTICATOR_BUILD_ID; }

std::string BasisLabel(const TimeBasisConfig& basis) {
  std::string label(BasisFamilyName(basis.family()));
  if (basis.family() == BasisFamily::kFourierCosine ||
      basis.family() == BasisFamily::kFourierHalf ||
      basis.family() == BasisFamily::kPolynomial) {
    label += "_d" + std::to_string(basis.dimension());
  }
  return label;
}

void EmitWeightTable(long k, int delta,
                     const std::vector<TimeBasisConfig>& bases,
                     std::ostream& out, double alpha) {
  if (k < 1) throw DomainError("weight table needs k >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("decay reference needs alpha in (0, 1]");
  }
  std::vector<Vector> columns;
  for (const TimeBasisConfig& basis : bases) {
    columns.push_back(ForecastWeights(k, delta, basis));
  }
  Vector decay(k);
  for (long i = 1; i <= k; ++i) {
    decay(i - 1) = std::pow(alpha, static_cast<double>(k - i));
  }
  decay /= decay.sum();

  out << "episode_index";
  for (const TimeBasisConfig& basis : bases) out << ',' << BasisLabel(basis);
  out << ",exp_decay\n";
  for (long i = 0; i < k; ++i) {
    out << (i + 1);
    for (const Vector& c : columns) out << ',' << FormatNumber(c(i));
    out << ',' << FormatNumber(decay(i)) << '\n';
  }
}

}  // namespace prognosticator
