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

#ifndef PROGNOSTICATOR_TRAJECTORY_H_
#define PROGNOSTICATOR_TRAJECTORY_H_

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "prognosticator/linalg.h"

namespace prognosticator {

using ConstRowMajorMap = Eigen::Map<const RowMajorMatrix>;

// Read-only view over a contiguous run of episodes stored step-major.
// Steps of episode e occupy [offsets[e] - offsets[0], offsets[e+1] -
// offsets[0]) in the step arrays.
class EpisodeBatch {
 public:
  EpisodeBatch(long first_episode, int state_dim,
               std::span<const double> states, std::span<const int> actions,
               std::span<const double> behavior_probs,
               std::span<const double> log_behavior_probs,
               std::span<const double> rewards,
               std::span<const std::size_t> offsets);

  long first_episode() const { return first_episode_; }
  int num_episodes() const { return static_cast<int>(offsets_.size()) - 1; }
  Eigen::Index num_steps() const {
    return static_cast<Eigen::Index>(actions_.size());
  }
  int state_dim() const { return state_dim_; }

  // num_steps x state_dim.
  ConstRowMajorMap states() const {
    return ConstRowMajorMap(states_.data(), num_steps(), state_dim_);
  }
  std::span<const int> actions() const { return actions_; }
  std::span<const double> behavior_probs() const { return behavior_probs_; }
  std::span<const double> log_behavior_probs() const {
    return log_behavior_probs_;
  }
  std::span<const double> rewards() const { return rewards_; }

  Eigen::Index episode_begin(int e) const {
    return static_cast<Eigen::Index>(offsets_[e] - offsets_[0]);
  }
  Eigen::Index episode_end(int e) const {
    return static_cast<Eigen::Index>(offsets_[e + 1] - offsets_[0]);
  }
  Eigen::Index episode_length(int e) const {
    return episode_end(e) - episode_begin(e);
  }
  long episode_index(int e) const { return first_episode_ + e; }

  // Optional table of distinct states: row s of states() equals row
  // state_ids()[s] of distinct_states(). Empty when the batch has no table.
  void SetStateTable(std::span<const int> state_ids,
                     std::span<const double> distinct_states);
  bool has_state_table() const { return !state_ids_.empty(); }
  std::span<const int> state_ids() const { return state_ids_; }
  ConstRowMajorMap distinct_states() const {
    return ConstRowMajorMap(distinct_states_.data(),
                            static_cast<Eigen::Index>(distinct_states_.size()) /
                                state_dim_,
                            state_dim_);
  }

 private:
  long first_episode_;
  int state_dim_;
  std::span<const double> states_;
  std::span<const int> actions_;
  std::span<const double> behavior_probs_;
  std::span<const double> log_behavior_probs_;
  std::span<const double> rewards_;
  std::span<const std::size_t> offsets_;
  std::span<const int> state_ids_;
  std::span<const double> distinct_states_;
};

// One episode: states, actions, the behavior policy's probability of each
// action and the rewards. Only (state, action, probability, reward) is ever
// needed to re-evaluate a new policy on the episode.
class Trajectory {
 public:
  Trajectory(long episode_index, int state_dim);

  // Throws DataCorruptionError on a probability outside (0, 1] or a
  // non-finite reward, DimensionError on a wrongly sized state.
  void AddStep(std::span<const double> state, int action,
               double behavior_prob, double reward);
  void AddStep(const Vector& state, int action, double behavior_prob,
               double reward) {
    AddStep(std::span<const double>(state.data(), state.size()), action,
            behavior_prob, reward);
  }

  long episode_index() const { return episode_index_; }
  int state_dim() const { return state_dim_; }
  std::size_t length() const { return actions_.size(); }
  std::span<const double> states() const { return states_; }
  std::span<const int> actions() const { return actions_; }
  std::span<const double> behavior_probs() const { return behavior_probs_; }
  std::span<const double> rewards() const { return rewards_; }

  EpisodeBatch View() const;

 private:
  long episode_index_;
  int state_dim_;
  std::vector<double> states_;
  std::vector<int> actions_;
  std::vector<double> behavior_probs_;
  std::vector<double> log_behavior_probs_;
  std::vector<double> rewards_;
  std::size_t offsets_[2] = {0, 0};
};

// sum_t gamma^t r_t
double DiscountedReturn(std::span<const double> rewards, double gamma);
double DiscountedReturn(const Trajectory& trajectory, double gamma);

// Append-only episode store. Episode indices are 1-based and contiguous.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int state_dim) : state_dim_(state_dim) {}

  // Throws SequencingError unless traj.episode_index() == size() + 1.
  void Insert(const Trajectory& traj);

  int size() const { return static_cast<int>(offsets_.size()) - 1; }
  bool empty() const { return size() == 0; }
  int state_dim() const { return state_dim_; }

  // Episodes [first, first + count), 1-based.
  EpisodeBatch Slice(long first, int count) const;
  EpisodeBatch All() const { return Slice(1, size()); }
  // The most recent `count` episodes.
  EpisodeBatch Recent(int count) const;
  EpisodeBatch Episode(long index) const { return Slice(index, 1); }

  // One line per step: episode,t,state...,action,behavior_prob,reward.
  void WriteLog(std::ostream& out) const;

  int num_distinct_states() const {
    return static_cast<int>(distinct_states_.size()) / state_dim_;
  }

 private:
  int state_dim_;
  std::vector<double> states_;
  std::vector<int> actions_;
  std::vector<double> behavior_probs_;
  std::vector<double> log_behavior_probs_;
  std::vector<double> rewards_;
  std::vector<std::size_t> offsets_{0};
  // Every slice carries the whole table, so it only ever grows.
  std::vector<int> state_ids_;
  std::vector<double> distinct_states_;
  std::map<std::vector<double>, int> state_lookup_;
};

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_TRAJECTORY_H_
