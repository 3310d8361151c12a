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

#include "prognosticator/policy.h"

#include <cmath>
#include <string>

namespace prognosticator {
namespace {

Eigen::Map<const RowMajorMatrix> AsRow(const Vector& state) {
  return Eigen::Map<const RowMajorMatrix>(state.data(), 1, state.size());
}

void CheckStates(const StateBlock& states, int state_dim) {
  if (states.cols() != state_dim) {
    throw DimensionError("states have " + std::to_string(states.cols()) +
                         " columns, policy expects " +
                         std::to_string(state_dim));
  }
}

}  // namespace

void Policy::set_parameters(const Vector& theta) {
  if (theta.size() != params_.size()) {
    throw DimensionError("parameter vector of length " +
                         std::to_string(theta.size()) + ", expected " +
                         std::to_string(params_.size()));
  }
  if (!theta.allFinite()) {
    throw DivergenceError("non-finite policy parameters");
  }
  params_ = theta;
}

PolicyEvaluation Policy::Evaluate(const StateBlock& states) const {
  CheckStates(states, state_dim());
  PolicyEvaluation out;
  Matrix logits = Logits(states, &out.hidden);
  // Max-subtracted log-softmax, row by row.
  const Vector row_max = logits.rowwise().maxCoeff();
  logits.colwise() -= row_max;
  out.probs = logits.array().exp().matrix();
  const Vector row_sum = out.probs.rowwise().sum();
  out.probs.array().colwise() /= row_sum.array();
  out.log_probs = logits;
  out.log_probs.colwise() -= row_sum.array().log().matrix();
  return out;
}

Vector Policy::ActionProbabilities(const Vector& state) const {
  return Evaluate(AsRow(state)).probs.row(0).transpose();
}

Vector Policy::LogProbGradient(const Vector& state, int action) const {
  if (action < 0 || action >= num_actions()) {
    throw DomainError("invalid action " + std::to_string(action));
  }
  const auto row = AsRow(state);
  const PolicyEvaluation eval = Evaluate(row);
  const int a = action;
  return Backprop(row, eval,
                  ScoreLogitGradient(eval, std::span<const int>(&a, 1),
                                     Vector::Ones(1)));
}

EntropyReport Policy::EntropyAndGradient(const StateBlock& states) const {
  if (states.rows() == 0) throw DomainError("entropy of an empty batch");
  const PolicyEvaluation eval = Evaluate(states);
  EntropyReport report;
  report.entropy = MeanEntropy(eval.probs, eval.log_probs);
  report.gradient = Backprop(states, eval, EntropyLogitGradient(eval));
  return report;
}

SampledAction Policy::SampleAction(const Vector& state, Rng& rng) const {
  const Vector probs = ActionProbabilities(state);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cumulative = 0.0;
  int action = static_cast<int>(probs.size()) - 1;
  for (int a = 0; a < probs.size(); ++a) {
    cumulative += probs(a);
    if (u < cumulative) {
      action = a;
      break;
    }
  }
  return {action, probs(action)};
}

Matrix EntropyLogitGradient(const PolicyEvaluation& evaluation) {
  return EntropyLogitGradient(evaluation.probs, evaluation.log_probs);
}

Matrix EntropyLogitGradient(const Eigen::Ref<const Matrix>& probs,
                            const Eigen::Ref<const Matrix>& log_probs) {
  const Eigen::Index rows = probs.rows();
  const Eigen::ArrayXd entropy =
      -(probs.array() * log_probs.array()).rowwise().sum();
  Eigen::ArrayXXd shifted = log_probs.array();
  shifted.colwise() += entropy;
  return (-(probs.array() * shifted) / static_cast<double>(rows)).matrix();
}

double MeanEntropy(const Eigen::Ref<const Matrix>& probs,
                   const Eigen::Ref<const Matrix>& log_probs) {
  return -(probs.array() * log_probs.array()).rowwise().sum().mean();
}

Matrix ScoreLogitGradient(const PolicyEvaluation& evaluation,
                          std::span<const int> actions, const Vector& coeff) {
  const Eigen::Index rows = evaluation.probs.rows();
  if (static_cast<Eigen::Index>(actions.size()) != rows ||
      coeff.size() != rows) {
    throw DimensionError("score gradient: actions/coefficients mismatch");
  }
  Matrix grad = -(coeff.asDiagonal() * evaluation.probs);
  for (Eigen::Index r = 0; r < rows; ++r) grad(r, actions[r]) += coeff(r);
  return grad;
}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(int num_actions, int feature_dim)
    : SoftmaxLinearPolicy(num_actions, feature_dim,
                          Vector::Zero(num_actions * feature_dim)) {}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(int num_actions, int feature_dim,
                                         Vector theta)
    : Policy(std::move(theta)),
      num_actions_(num_actions),
      feature_dim_(feature_dim) {
  if (num_actions < 1 || feature_dim < 1) {
    throw DimensionError("softmax policy needs actions and features");
  }
  if (params_.size() != num_actions * feature_dim) {
    throw DimensionError("softmax policy parameter count mismatch");
  }
}

std::unique_ptr<Policy> SoftmaxLinearPolicy::Clone() const {
  return std::make_unique<SoftmaxLinearPolicy>(*this);
}

Matrix SoftmaxLinearPolicy::Logits(const StateBlock& states,
                                   Matrix* /*hidden*/) const {
  const Eigen::Map<const RowMajorMatrix> w(params_.data(), num_actions_,
                                           feature_dim_);
  return states * w.transpose();
}

Vector SoftmaxLinearPolicy::Backprop(const StateBlock& states,
                                     const PolicyEvaluation& /*evaluation*/,
                                     const Matrix& dlogits) const {
  CheckStates(states, feature_dim_);
  RowMajorMatrix dw = dlogits.transpose() * states;
  return Eigen::Map<const Vector>(dw.data(), dw.size());
}

MlpSoftmaxPolicy::MlpSoftmaxPolicy(int input_dim, int hidden_dim,
                                   int num_actions, Rng& rng)
    : MlpSoftmaxPolicy(
          input_dim, hidden_dim, num_actions,
          Vector::Zero(ParameterCount(input_dim, hidden_dim, num_actions))) {
  std::uniform_real_distribution<double> w1(-1.0 / std::sqrt(input_dim),
                                            1.0 / std::sqrt(input_dim));
  std::uniform_real_distribution<double> w2(-1.0 / std::sqrt(hidden_dim),
                                            1.0 / std::sqrt(hidden_dim));
  int p = 0;
  for (int i = 0; i < hidden_dim * input_dim; ++i) params_(p++) = w1(rng);
  p += hidden_dim;
  for (int i = 0; i < num_actions * hidden_dim; ++i) params_(p++) = w2(rng);
}

MlpSoftmaxPolicy::MlpSoftmaxPolicy(int input_dim, int hidden_dim,
                                   int num_actions, Vector theta)
    : Policy(std::move(theta)),
      input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      num_actions_(num_actions) {
  if (input_dim < 1 || hidden_dim < 1 || num_actions < 1) {
    throw DimensionError("MLP policy sizes must be positive");
  }
  if (params_.size() != ParameterCount(input_dim, hidden_dim, num_actions)) {
    throw DimensionError("MLP policy parameter count mismatch");
  }
}

std::unique_ptr<Policy> MlpSoftmaxPolicy::Clone() const {
  return std::make_unique<MlpSoftmaxPolicy>(*this);
}

MlpSoftmaxPolicy::ConstMatrixMap MlpSoftmaxPolicy::W1() const {
  return ConstMatrixMap(params_.data(), hidden_dim_, input_dim_);
}

Eigen::Map<const Vector> MlpSoftmaxPolicy::b1() const {
  return Eigen::Map<const Vector>(params_.data() + hidden_dim_ * input_dim_,
                                  hidden_dim_);
}

MlpSoftmaxPolicy::ConstMatrixMap MlpSoftmaxPolicy::W2() const {
  return ConstMatrixMap(params_.data() + hidden_dim_ * (input_dim_ + 1),
                        num_actions_, hidden_dim_);
}

Eigen::Map<const Vector> MlpSoftmaxPolicy::b2() const {
  return Eigen::Map<const Vector>(
      params_.data() + hidden_dim_ * (input_dim_ + 1) +
          num_actions_ * hidden_dim_,
      num_actions_);
}

Matrix MlpSoftmaxPolicy::Logits(const StateBlock& states,
                                Matrix* hidden) const {
  Matrix pre = states * W1().transpose();
  pre.rowwise() += b1().transpose();
  // tanh through Eigen's vectorized exp; the scalar libm tanh dominates
  // otherwise. e = exp(-2|x|) never overflows.
  const Eigen::ArrayXXd e = (-2.0 * pre.array().abs()).exp();
  Matrix h = (pre.array().sign() * (1.0 - e) / (1.0 + e)).matrix();
  Matrix logits = h * W2().transpose();
  logits.rowwise() += b2().transpose();
  if (hidden != nullptr) *hidden = std::move(h);
  return logits;
}

Vector MlpSoftmaxPolicy::Backprop(const StateBlock& states,
                                  const PolicyEvaluation& evaluation,
                                  const Matrix& dlogits) const {
  CheckStates(states, input_dim_);
  const Matrix& h = evaluation.hidden;
  if (h.rows() != states.rows() || dlogits.rows() != states.rows()) {
    throw DimensionError("MLP backprop: evaluation does not match states");
  }
  Vector grad(params_.size());
  const Matrix dpre =
      ((dlogits * W2()).array() * (1.0 - h.array().square())).matrix();
  int p = 0;
  {
    RowMajorMatrix dw1 = dpre.transpose() * states;
    grad.segment(p, dw1.size()) = Eigen::Map<const Vector>(dw1.data(),
                                                           dw1.size());
    p += static_cast<int>(dw1.size());
  }
  grad.segment(p, hidden_dim_) = dpre.colwise().sum().transpose();
  p += hidden_dim_;
  {
    RowMajorMatrix dw2 = dlogits.transpose() * h;
    grad.segment(p, dw2.size()) = Eigen::Map<const Vector>(dw2.data(),
                                                           dw2.size());
    p += static_cast<int>(dw2.size());
  }
  grad.segment(p, num_actions_) = dlogits.colwise().sum().transpose();
  return grad;
}

}  // namespace prognosticator
