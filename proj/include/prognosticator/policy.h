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

// Differentiable softmax policies over discrete actions.
//
// Policies are evaluated on a whole block of states at once: Evaluate()
// produces the action distribution of every row, and Backprop() maps any
// per-row gradient with respect to the logits back onto the parameters. Both
// the score function d log pi(a|s) / d theta and the entropy gradient are
// logit-space gradients pushed through Backprop(), so a full replay buffer is
// differentiated with one forward and one backward pass.

#ifndef PROGNOSTICATOR_POLICY_H_
#define PROGNOSTICATOR_POLICY_H_

#include <memory>
#include <random>
#include <span>
#include <string_view>
#include <utility>

#include "prognosticator/linalg.h"

namespace prognosticator {

using Rng = std::mt19937_64;
using StateBlock = Eigen::Ref<const RowMajorMatrix>;

struct PolicyEvaluation {
  Matrix probs;      // rows x actions
  Matrix log_probs;  // rows x actions
  Matrix hidden;     // rows x hidden units; empty for linear policies
};

struct EntropyReport {
  double entropy = 0.0;  // mean over the states
  Vector gradient;
};

struct SampledAction {
  int action = 0;
  double probability = 1.0;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::unique_ptr<Policy> Clone() const = 0;
  virtual std::string_view family() const = 0;
  virtual int num_actions() const = 0;
  virtual int state_dim() const = 0;

  int num_parameters() const { return static_cast<int>(params_.size()); }
  const Vector& parameters() const { return params_; }
  // Throws DimensionError on a size mismatch and DivergenceError on
  // non-finite entries.
  void set_parameters(const Vector& theta);

  PolicyEvaluation Evaluate(const StateBlock& states) const;

  // sum over rows r of dlogits.row(r) . d logits(r) / d theta.
  virtual Vector Backprop(const StateBlock& states,
                          const PolicyEvaluation& evaluation,
                          const Matrix& dlogits) const = 0;

  Vector ActionProbabilities(const Vector& state) const;
  Vector LogProbGradient(const Vector& state, int action) const;
  // Mean entropy -sum_a pi(a|s) ln pi(a|s) over the rows of `states` and its
  // exact parameter gradient.
  EntropyReport EntropyAndGradient(const StateBlock& states) const;
  SampledAction SampleAction(const Vector& state, Rng& rng) const;

 protected:
  explicit Policy(Vector params) : params_(std::move(params)) {}
  Policy(const Policy&) = default;
  Policy& operator=(const Policy&) = default;

  // Writes hidden activations into `hidden` when the policy has any.
  virtual Matrix Logits(const StateBlock& states, Matrix* hidden) const = 0;

  Vector params_;
};

// Logit-space gradient of the mean entropy over the given evaluation rows:
// dH/dz_a = -pi_a (ln pi_a + H) / rows.
Matrix EntropyLogitGradient(const PolicyEvaluation& evaluation);
Matrix EntropyLogitGradient(const Eigen::Ref<const Matrix>& probs,
                            const Eigen::Ref<const Matrix>& log_probs);
// Mean entropy over the rows.
double MeanEntropy(const Eigen::Ref<const Matrix>& probs,
                   const Eigen::Ref<const Matrix>& log_probs);

// Row-wise score function in logit space, scaled: coeff_r (e_{a_r} - pi_r).
Matrix ScoreLogitGradient(const PolicyEvaluation& evaluation,
                          std::span<const int> actions, const Vector& coeff);

// logits = W s, W stored row-major as num_actions x feature_dim.
class SoftmaxLinearPolicy final : public Policy {
 public:
  SoftmaxLinearPolicy(int num_actions, int feature_dim);
  SoftmaxLinearPolicy(int num_actions, int feature_dim, Vector theta);

  std::unique_ptr<Policy> Clone() const override;
  std::string_view family() const override { return "softmax_linear"; }
  int num_actions() const override { return num_actions_; }
  int state_dim() const override { return feature_dim_; }

  Vector Backprop(const StateBlock& states, const PolicyEvaluation& evaluation,
                  const Matrix& dlogits) const override;

 protected:
  Matrix Logits(const StateBlock& states, Matrix* hidden) const override;

 private:
  int num_actions_;
  int feature_dim_;
};

// logits = W2 tanh(W1 s + b1) + b2. Parameters are laid out as
// [W1 (row-major), b1, W2 (row-major), b2].
class MlpSoftmaxPolicy final : public Policy {
 public:
  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  MlpSoftmaxPolicy(int input_dim, int hidden_dim, int num_actions, Rng& rng);
  MlpSoftmaxPolicy(int input_dim, int hidden_dim, int num_actions,
                   Vector theta);

  static int ParameterCount(int input_dim, int hidden_dim, int num_actions) {
    return hidden_dim * (input_dim + 1) + num_actions * (hidden_dim + 1);
  }

  std::unique_ptr<Policy> Clone() const override;
  std::string_view family() const override { return "mlp"; }
  int num_actions() const override { return num_actions_; }
  int state_dim() const override { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }

  Vector Backprop(const StateBlock& states, const PolicyEvaluation& evaluation,
                  const Matrix& dlogits) const override;

 protected:
  Matrix Logits(const StateBlock& states, Matrix* hidden) const override;

 private:
  using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;
  ConstMatrixMap W1() const;
  ConstMatrixMap W2() const;
  Eigen::Map<const Vector> b1() const;
  Eigen::Map<const Vector> b2() const;

  int input_dim_;
  int hidden_dim_;
  int num_actions_;
};

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_POLICY_H_
