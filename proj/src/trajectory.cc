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

#include "prognosticator/trajectory.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace prognosticator {

EpisodeBatch::EpisodeBatch(long first_episode, int state_dim,
                           std::span<const double> states,
                           std::span<const int> actions,
                           std::span<const double> behavior_probs,
                           std::span<const double> log_behavior_probs,
                           std::span<const double> rewards,
                           std::span<const std::size_t> offsets)
    : first_episode_(first_episode),
      state_dim_(state_dim),
      states_(states),
      actions_(actions),
      behavior_probs_(behavior_probs),
      log_behavior_probs_(log_behavior_probs),
      rewards_(rewards),
      offsets_(offsets) {
  if (offsets_.empty()) throw DimensionError("episode batch without offsets");
  const std::size_t steps = actions_.size();
  if (behavior_probs_.size() != steps ||
      log_behavior_probs_.size() != steps || rewards_.size() != steps ||
      states_.size() != steps * static_cast<std::size_t>(state_dim_) ||
      offsets_.back() - offsets_.front() != steps) {
    throw DimensionError("inconsistent episode batch arrays");
  }
}

void EpisodeBatch::SetStateTable(std::span<const int> state_ids,
                                 std::span<const double> distinct_states) {
  if (state_ids.size() != actions_.size() ||
      distinct_states.size() % static_cast<std::size_t>(state_dim_) != 0) {
    throw DimensionError("state table does not match the batch");
  }
  state_ids_ = state_ids;
  distinct_states_ = distinct_states;
}

Trajectory::Trajectory(long episode_index, int state_dim)
    : episode_index_(episode_index), state_dim_(state_dim) {
  if (episode_index < 1) {
    throw SequencingError("episode indices are 1-based");
  }
  if (state_dim < 1) throw DimensionError("state dimension must be >= 1");
}

void Trajectory::AddStep(std::span<const double> state, int action,
                         double behavior_prob, double reward) {
  if (static_cast<int>(state.size()) != state_dim_) {
    throw DimensionError("state of size " + std::to_string(state.size()) +
                         ", expected " + std::to_string(state_dim_));
  }
  if (!(behavior_prob > 0.0 && behavior_prob <= 1.0)) {
    throw DataCorruptionError("behavior probability " +
                              std::to_string(behavior_prob) +
                              " outside (0, 1]");
  }
  if (!std::isfinite(reward)) {
    throw DataCorruptionError("non-finite reward");
  }
  if (action < 0) throw DomainError("negative action id");
  states_.insert(states_.end(), state.begin(), state.end());
  actions_.push_back(action);
  behavior_probs_.push_back(behavior_prob);
  log_behavior_probs_.push_back(std::log(behavior_prob));
  rewards_.push_back(reward);
  offsets_[1] = actions_.size();
}

EpisodeBatch Trajectory::View() const {
  return EpisodeBatch(episode_index_, state_dim_, states_, actions_,
                      behavior_probs_, log_behavior_probs_, rewards_,
                      std::span<const std::size_t>(offsets_, 2));
}

double DiscountedReturn(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

double DiscountedReturn(const Trajectory& trajectory, double gamma) {
  return DiscountedReturn(trajectory.rewards(), gamma);
}

void ReplayBuffer::Insert(const Trajectory& traj) {
  if (traj.episode_index() != size() + 1) {
    throw SequencingError("expected episode " + std::to_string(size() + 1) +
                          ", got " + std::to_string(traj.episode_index()));
  }
  if (traj.state_dim() != state_dim_) {
    throw DimensionError("trajectory state dimension mismatch");
  }
  states_.insert(states_.end(), traj.states().begin(), traj.states().end());
  actions_.insert(actions_.end(), traj.actions().begin(),
                  traj.actions().end());
  behavior_probs_.insert(behavior_probs_.end(), traj.behavior_probs().begin(),
                         traj.behavior_probs().end());
  for (double p : traj.behavior_probs()) {
    log_behavior_probs_.push_back(std::log(p));
  }
  rewards_.insert(rewards_.end(), traj.rewards().begin(),
                  traj.rewards().end());
  offsets_.push_back(actions_.size());
  const auto states = traj.states();
  const std::size_t sd = static_cast<std::size_t>(state_dim_);
  for (std::size_t t = 0; t < traj.length(); ++t) {
    std::vector<double> key(states.begin() + t * sd,
                            states.begin() + (t + 1) * sd);
    const int next = num_distinct_states();
    const auto [it, inserted] = state_lookup_.try_emplace(std::move(key), next);
    if (inserted) {
      distinct_states_.insert(distinct_states_.end(), it->first.begin(),
                              it->first.end());
    }
    state_ids_.push_back(it->second);
  }
}

EpisodeBatch ReplayBuffer::Slice(long first, int count) const {
  if (first < 1 || count < 1 || first + count - 1 > size()) {
    throw DomainError("episode slice [" + std::to_string(first) + ", " +
                      std::to_string(first + count) +
                      ") outside buffer of size " + std::to_string(size()));
  }
  const std::size_t begin = offsets_[first - 1];
  const std::size_t end = offsets_[first - 1 + count];
  const std::size_t sd = static_cast<std::size_t>(state_dim_);
  EpisodeBatch batch(
      first, state_dim_,
      std::span<const double>(states_).subspan(begin * sd, (end - begin) * sd),
      std::span<const int>(actions_).subspan(begin, end - begin),
      std::span<const double>(behavior_probs_).subspan(begin, end - begin),
      std::span<const double>(log_behavior_probs_).subspan(begin, end - begin),
      std::span<const double>(rewards_).subspan(begin, end - begin),
      std::span<const std::size_t>(offsets_).subspan(first - 1, count + 1));
  batch.SetStateTable(
      std::span<const int>(state_ids_).subspan(begin, end - begin),
      distinct_states_);
  return batch;
}

EpisodeBatch ReplayBuffer::Recent(int count) const {
  return Slice(size() - count + 1, count);
}

void ReplayBuffer::WriteLog(std::ostream& out) const {
  const std::size_t sd = static_cast<std::size_t>(state_dim_);
  for (int e = 0; e < size(); ++e) {
    for (std::size_t s = offsets_[e]; s < offsets_[e + 1]; ++s) {
      out << (e + 1) << ',' << (s - offsets_[e]);
      for (std::size_t j = 0; j < sd; ++j) out << ',' << states_[s * sd + j];
      out << ',' << actions_[s] << ',' << behavior_probs_[s] << ','
          << rewards_[s] << '\n';
    }
  }
}

}  // namespace prognosticator
