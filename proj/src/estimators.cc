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

#include "prognosticator/estimators.h"

#include <cmath>
#include <string>

namespace prognosticator {
namespace {

void CheckForecastShape(long k, int delta, const TimeBasisConfig& basis) {
  if (delta < 1) throw DomainError("forecast horizon delta must be >= 1");
  if (k < basis.dimension()) {
    throw DimensionError("need at least " +
                         std::to_string(basis.dimension()) +
                      " episodes to fit a " + basis.ToString() +
                      " forecast, have " + std::to_string(k));
  }
}

RowVector MeanTargetRow(long k, int delta, const TimeBasisConfig& basis) {
  RowVector row = RowVector::Zero(basis.dimension());
  for (int step = 1; step <= delta; ++step) row += EncodeTime(k + step, basis);
  return row / static_cast<double>(delta);
}

Vector ForecastsFrom(const Vector& coefficients, long k, int delta,
                     const TimeBasisConfig& basis) {
  Vector out(delta);
  for (int step = 1; step <= delta; ++step) {
    out(step - 1) = EncodeTime(k + step, basis).dot(coefficients);
  }
  return out;
}

}  // namespace

BatchEvaluation EvaluateBatch(const EpisodeBatch& batch,
                              const Policy& policy) {
  BatchEvaluation out;
  const Eigen::Index steps = batch.num_steps();
  if (batch.has_state_table() && 2 * batch.distinct_states().rows() <= steps) {
    out.rows = policy.Evaluate(batch.distinct_states());
    out.step_rows = batch.state_ids();
  } else {
    out.rows = policy.Evaluate(batch.states());
  }
  const auto actions = batch.actions();
  const int num_actions = policy.num_actions();
  out.chosen_probs.resize(steps);
  for (Eigen::Index s = 0; s < steps; ++s) {
    if (actions[s] < 0 || actions[s] >= num_actions) {
      throw DataCorruptionError("action " + std::to_string(actions[s]) +
                                " outside the policy's action set");
    }
    out.chosen_probs(s) = out.rows.probs(out.row(s), actions[s]);
  }
  return out;
}

Matrix ScoreRowGradient(const EpisodeBatch& batch,
                        const BatchEvaluation& evaluation, const Vector& coeff) {
  if (coeff.size() != batch.num_steps()) {
    throw DimensionError("score gradient: one coefficient per step");
  }
  const Matrix& probs = evaluation.rows.probs;
  Matrix grad = Matrix::Zero(probs.rows(), probs.cols());
  Vector total = Vector::Zero(probs.rows());
  const auto actions = batch.actions();
  for (Eigen::Index s = 0; s < coeff.size(); ++s) {
    const Eigen::Index r = evaluation.row(s);
    grad(r, actions[s]) += coeff(s);
    total(r) += coeff(s);
  }
  grad -= total.asDiagonal() * probs;
  return grad;
}

double AddEntropyRows(const BatchEvaluation& evaluation, Eigen::Index begin,
                      Eigen::Index end, double lambda, Matrix* row_gradient) {
  if (end <= begin) return 0.0;
  const Matrix& probs = evaluation.rows.probs;
  const Matrix& log_probs = evaluation.rows.log_probs;
  // Share of the entropy steps that sit on each row.
  Vector share = Vector::Zero(probs.rows());
  const double unit = 1.0 / static_cast<double>(end - begin);
  for (Eigen::Index s = begin; s < end; ++s) share(evaluation.row(s)) += unit;
  const Vector row_entropy =
      -(probs.array() * log_probs.array()).rowwise().sum().matrix();
  const double entropy = share.dot(row_entropy);
  if (row_gradient != nullptr && lambda != 0.0) {
    Eigen::ArrayXXd term = log_probs.array();
    term.colwise() += row_entropy.array();
    term *= probs.array();
    term.colwise() *= lambda * share.array();
    row_gradient->array() -= term;
  }
  return entropy;
}

Vector BackpropBatch(const EpisodeBatch& batch, const Policy& policy,
                     const BatchEvaluation& evaluation,
                     const Matrix& row_gradient) {
  if (row_gradient.rows() != evaluation.rows.probs.rows()) {
    throw DimensionError("logit gradient does not match the evaluated rows");
  }
  if (evaluation.compressed()) {
    return policy.Backprop(batch.distinct_states(), evaluation.rows,
                           row_gradient);
  }
  return policy.Backprop(batch.states(), evaluation.rows, row_gradient);
}

ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const PolicyEvaluation& evaluation,
                                       double gamma,
                                       std::optional<double> clip) {
  if (evaluation.log_probs.rows() != batch.num_steps()) {
    throw DimensionError("policy evaluation does not cover the batch");
  }
  BatchEvaluation steps;
  steps.rows = evaluation;
  steps.chosen_probs.resize(batch.num_steps());
  const auto actions = batch.actions();
  for (Eigen::Index s = 0; s < batch.num_steps(); ++s) {
    if (actions[s] < 0 || actions[s] >= evaluation.log_probs.cols()) {
      throw DataCorruptionError("action " + std::to_string(actions[s]) +
                                " outside the policy's action set");
    }
    steps.chosen_probs(s) = evaluation.probs(s, actions[s]);
  }
  return ComputeImportanceTerms(batch, steps, gamma, clip);
}

ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const BatchEvaluation& evaluation,
                                       double gamma,
                                       std::optional<double> clip) {
  const Eigen::Index steps = batch.num_steps();
  const int episodes = batch.num_episodes();
  if (evaluation.chosen_probs.size() != steps) {
    throw DimensionError("policy evaluation does not cover the batch");
  }
  if (clip && !(*clip > 0.0)) throw DomainError("clip must be positive");

  ImportanceTerms terms;
  terms.cumulative.resize(steps);
  terms.cumulative_slope.resize(steps);
  terms.discount.resize(steps);
  terms.pdis.resize(episodes);
  terms.trajectory_ratio.resize(episodes);
  terms.trajectory_ratio_slope.resize(episodes);
  terms.returns.resize(episodes);

  const auto behavior = batch.behavior_probs();
  const auto rewards = batch.rewards();
  for (int e = 0; e < episodes; ++e) {
    double product = 1.0;
    double discount = 1.0;
    double pdis = 0.0;
    double ret = 0.0;
    for (Eigen::Index s = batch.episode_begin(e); s < batch.episode_end(e);
         ++s) {
      const double beta = behavior[s];
      if (!(beta > 0.0 && beta <= 1.0)) {
        throw DataCorruptionError("behavior probability " +
                                  std::to_string(beta) + " at episode " +
                                  std::to_string(batch.episode_index(e)));
      }
      product *= evaluation.chosen_probs(s) / beta;
      const bool clipped = clip.has_value() && product > *clip;
      const double c = clipped ? *clip : product;
      terms.cumulative(s) = c;
      terms.cumulative_slope(s) = clipped ? 0.0 : c;
      terms.discount(s) = discount;
      pdis += c * discount * rewards[s];
      ret += discount * rewards[s];
      discount *= gamma;
    }
    const bool clipped = clip.has_value() && product > *clip;
    terms.trajectory_ratio(e) = clipped ? *clip : product;
    terms.trajectory_ratio_slope(e) = clipped ? 0.0 : product;
    terms.pdis(e) = pdis;
    terms.returns(e) = ret;
  }
  return terms;
}

ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const Policy& policy, double gamma,
                                       std::optional<double> clip) {
  return ComputeImportanceTerms(batch, EvaluateBatch(batch, policy), gamma,
                                clip);
}

double PdisEstimate(const EpisodeBatch& trajectory, const Policy& policy,
                    double gamma, std::optional<double> clip) {
  return ComputeImportanceTerms(trajectory, policy, gamma, clip).pdis(0);
}

double TrajectoryRatio(const EpisodeBatch& trajectory, const Policy& policy,
                       std::optional<double> clip) {
  return ComputeImportanceTerms(trajectory, policy, 1.0, clip)
      .trajectory_ratio(0);
}

ForecastDesign MakeForecastDesign(long k, int delta,
                                  const TimeBasisConfig& basis) {
  CheckForecastShape(k, delta, basis);
  ForecastDesign design;
  design.basis = basis.WithHorizon(static_cast<double>(k + delta));
  design.delta = delta;
  design.phi = BasisMatrix(k, design.basis);
  design.mean_target_row = MeanTargetRow(k, delta, design.basis);
  return design;
}

ForecastModel OlsForecastModel(long k, int delta,
                               const TimeBasisConfig& basis) {
  const ForecastDesign design = MakeForecastDesign(k, delta, basis);
  ForecastModel model;
  model.basis = design.basis;
  model.weighted = false;
  const GramFactorization<double> gram(
      (design.phi.transpose() * design.phi).eval());
  model.gram_inverse = gram.Inverse();
  model.mean_target_row = design.mean_target_row;
  model.forecast_weights =
      design.phi * gram.SolveVector(model.mean_target_row.transpose());
  return model;
}

Vector ForecastWeights(long k, int delta, const TimeBasisConfig& basis) {
  return OlsForecastModel(k, delta, basis).forecast_weights;
}

ForecastModel FitNis(const Vector& targets, int delta,
                     const TimeBasisConfig& basis) {
  const long k = targets.size();
  ForecastModel model = OlsForecastModel(k, delta, basis);
  const Matrix phi = BasisMatrix(k, model.basis);
  model.coefficients = model.gram_inverse * (phi.transpose() * targets);
  model.forecasts = ForecastsFrom(model.coefficients, k, delta, model.basis);
  return model;
}

ForecastModel FitNwis(const Vector& targets, const Vector& weights, int delta,
                      const TimeBasisConfig& basis) {
  return FitNwis(MakeForecastDesign(targets.size(), delta, basis), targets,
                 weights);
}

ForecastModel FitNwis(const ForecastDesign& design, const Vector& targets,
                      const Vector& weights) {
  const long k = design.phi.rows();
  if (targets.size() != k || weights.size() != k) {
    throw DimensionError("NWIS weights and targets must cover " +
                         std::to_string(k) + " episodes");
  }
  if ((weights.array() < 0.0).any()) {
    throw DomainError("NWIS weights must be nonnegative");
  }
  if (!(weights.sum() > 0.0)) {
    throw DegenerateWeightsError("every importance ratio is zero");
  }
  ForecastModel model;
  model.basis = design.basis;
  model.weighted = true;
  const Matrix weighted_phi = weights.asDiagonal() * design.phi;
  const GramFactorization<double> gram(
      (design.phi.transpose() * weighted_phi).eval());
  model.gram_inverse = gram.Inverse();
  model.mean_target_row = design.mean_target_row;
  model.coefficients = gram.SolveVector(weighted_phi.transpose() * targets);
  model.forecast_weights =
      weighted_phi * gram.SolveVector(model.mean_target_row.transpose());
  model.forecasts =
      ForecastsFrom(model.coefficients, k, design.delta, model.basis);
  return model;
}

Vector NisForecast(const EpisodeBatch& buffer, const Policy& policy,
                   double gamma, std::optional<double> clip,
                   const TimeBasisConfig& basis, int delta) {
  const ImportanceTerms terms =
      ComputeImportanceTerms(buffer, policy, gamma, clip);
  return FitNis(terms.pdis, delta, basis).forecasts;
}

Vector NwisForecast(const EpisodeBatch& buffer, const Policy& policy,
                    double gamma, std::optional<double> clip,
                    const TimeBasisConfig& basis, int delta) {
  const ImportanceTerms terms =
      ComputeImportanceTerms(buffer, policy, gamma, clip);
  return FitNwis(terms.returns, terms.trajectory_ratio, delta, basis)
      .forecasts;
}

}  // namespace prognosticator
