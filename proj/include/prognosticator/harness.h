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


// Experiment orchestration: trials over (agent, speed, seed), regret tables
// and CSV output.

#ifndef PROGNOSTICATOR_HARNESS_H_
#define PROGNOSTICATOR_HARNESS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "prognosticator/agents.h"
#include "prognosticator/basis.h"
#include "prognosticator/config.h"
#include "prognosticator/envs.h"

namespace prognosticator {

// Seeds of one trial. The trial seed is base_seed + 1000 * seed_index; the
// environment, policy initialization and action sampling streams use fixed
// offsets from it.
struct TrialSeeds {
  std::uint64_t trial = 0;
  std::uint64_t env = 0;
  std::uint64_t policy = 0;
  std::uint64_t agent = 0;
};
TrialSeeds SeedsFor(std::uint64_t base_seed, int seed_index);

struct TrialResult {
  AgentKind agent = AgentKind::kProOls;
  int speed = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  EpisodeLog log;
  // Per episode J*_k when the environment knows it.
  std::vector<double> optimal_returns;
};

// One trial; `trajectory_log`, if given, receives the replay buffer dump.
TrialResult RunTrial(const ExperimentConfig& config, AgentKind agent,
                     int speed, int seed_index,
                     std::ostream* trajectory_log = nullptr);

// sum_k (J*_k - J_k) / sum_k J*_k. Throws DimensionError on unequal lengths
// and DomainError if sum_k J*_k is not positive.
double NormalizedRegret(std::span<const double> optimal,
                        std::span<const double> achieved);

// Regret against the simulator's J*_k using the logged expected returns.
// Throws UnsupportedError unless `env` is a recommender.
double ComputeTrueRegret(const EpisodeLog& log, const Environment& env);

// returns[a][k] is agent a's return in episode k. J~*_k is the per-episode
// maximum over agents. Throws AlignmentError with fewer than two agents or
// unequal lengths.
std::vector<double> ComputeSurrogateRegret(
    const std::vector<std::vector<double>>& returns);

enum class RegretMetric { kTrue, kSurrogate };
std::string_view RegretMetricName(RegretMetric metric);

struct RegretRow {
  AgentKind agent = AgentKind::kProOls;
  int speed = 0;
  double mean = 0.0;
  double standard_error = 0.0;  // sample std / sqrt(#seeds); 0 for 1 seed
  RegretMetric metric = RegretMetric::kTrue;
};

struct RegretTable {
  std::vector<RegretRow> rows;

  // Throws DomainError if the row is missing.
  const RegretRow& Find(AgentKind agent, int speed, RegretMetric metric) const;
};

// Mean and sample-std / sqrt(n) standard error.
struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};
MeanAndError Summarize(std::span<const double> values);

// One row per (agent, speed, seed, episode), as written to episodes.csv.
struct EpisodeRow {
  long episode = 0;
  AgentKind agent = AgentKind::kProOls;
  int speed = 0;
  std::uint64_t seed = 0;
  double observed_return = 0.0;
  std::optional<double> expected_return;
  std::optional<double> optimal_return;
};

std::vector<EpisodeRow> FlattenTrials(const std::vector<TrialResult>& trials);

// True regret rows (when every row carries expected and optimal returns)
// followed by surrogate rows (when there are at least two agents), ordered
// by (agent, speed) in first-seen order. The surrogate uses expected returns
// when known and observed returns otherwise.
RegretTable ComputeRegretTable(const std::vector<EpisodeRow>& rows);

struct ExperimentResult {
  std::vector<TrialResult> trials;
  RegretTable regret;
};

// Runs every (agent, speed, seed) trial on a worker pool. Results come back
// in (agent, speed, seed) order regardless of scheduling. With
// write_trajectories set, each trial's buffer is dumped under
// <output_dir>/trajectories/.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// RunExperiment, then writes episodes.csv, regret.csv and meta.txt (and
// trajectories/ when configured) into config.output_dir. Throws IoError if
// the directory cannot be written.
ExperimentResult RunAndWriteExperiment(const ExperimentConfig& config);

void WriteEpisodesCsv(const std::vector<EpisodeRow>& rows, std::ostream& out);
void WriteRegretCsv(const RegretTable& table, std::ostream& out);
void WriteMeta(const ExperimentConfig& config, std::ostream& out);

// Inverses of the writers. Throw DataCorruptionError on malformed input.
std::vector<EpisodeRow> ReadEpisodesCsv(std::istream& in);
RegretTable ReadRegretCsv(std::istream& in);

// One grid point of a sweep: the base configuration with the point's
// hyperparameters applied to every agent (basis_d to forecasting agents
// only) and output_dir set to <base>/point_<i>.
struct SweepPoint {
  int index = 0;
  std::vector<std::pair<std::string, std::string>> settings;
  ExperimentConfig config;
};
std::vector<SweepPoint> ExpandSweep(const ExperimentConfig& base);

// Runs every point, writing each point's files plus <base>/sweep.csv with
// one row per (point, regret row).
void RunSweep(const ExperimentConfig& base);

// Identifier of the source tree the binary was built from.
std::string BuildIdentifier();

// Forecast weights for each basis at k, delta plus an exponential-decay
// reference alpha^(k-i), normalized to sum 1. Columns: episode_index, one
// per basis, exp_decay.
void EmitWeightTable(long k, int delta,
                     const std::vector<TimeBasisConfig>& bases,
                     std::ostream& out, double alpha = 0.95);

// Column label such as "fourier_cosine_d5" or "identity".
std::string BasisLabel(const TimeBasisConfig& basis);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_HARNESS_H_
