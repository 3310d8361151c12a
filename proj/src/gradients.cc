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

#include "prognosticator/gradients.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace prognosticator {
namespace {

// Steps [begin, end) of the batch whose states define the entropy bonus.
struct StepRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
};

StepRange EntropySteps(const EpisodeBatch& batch, int entropy_episodes) {
  const int n = std::clamp(entropy_episodes, 1, batch.num_episodes());
  return {batch.episode_begin(batch.num_episodes() - n), batch.num_steps()};
}

int ResolveEntropyEpisodes(const ObjectiveOptions& options) {
  return options.entropy_episodes > 0 ? options.entropy_episodes
                                      : options.delta;
}

// Step coefficients of sum_e weights_e PDIS_e: for step t of episode e,
// weights_e * sum_{l>=t} slope_l gamma^l r_l.
Vector PdisStepCoefficients(const EpisodeBatch& batch,
                            const ImportanceTerms& terms,
                            const Vector& weights) {
  Vector coeff(batch.num_steps());
  const auto rewards = batch.rewards();
  for (int e = 0; e < batch.num_episodes(); ++e) {
    double suffix = 0.0;
    for (Eigen::Index s = batch.episode_end(e) - 1; s >= batch.episode_begin(e);
         --s) {
      suffix += terms.cumulative_slope(s) * terms.discount(s) * rewards[s];
      coeff(s) = weights(e) * suffix;
    }
  }
  return coeff;
}

void CheckFinite(const GradientReport& report) {
  if (!report.gradient.allFinite() || !std::isfinite(report.objective_value)) {
    throw DivergenceError("non-finite gradient or objective");
  }
}

}  // namespace

Vector PdisGradient(const EpisodeBatch& trajectory, const Policy& policy,
                    double gamma, std::optional<double> clip) {
  const BatchEvaluation eval = EvaluateBatch(trajectory, policy);
  const ImportanceTerms terms =
      ComputeImportanceTerms(trajectory, eval, gamma, clip);
  Vector weights = Vector::Zero(trajectory.num_episodes());
  weights(0) = 1.0;
  const Vector coeff = PdisStepCoefficients(trajectory, terms, weights);
  return BackpropBatch(trajectory, policy, eval,
                       ScoreRowGradient(trajectory, eval, coeff));
}

GradientReport WeightedPdisGradient(const EpisodeBatch& batch,
                                    const Policy& policy,
                                    const Vector& weights, double gamma,
                                    std::optional<double> clip, double lambda,
                                    int entropy_episodes) {
  if (weights.size() != batch.num_episodes()) {
    throw DimensionError("episode weights of length " +
                         std::to_string(weights.size()) + " for " +
                         std::to_string(batch.num_episodes()) + " episodes");
  }
  const BatchEvaluation eval = EvaluateBatch(batch, policy);
  const ImportanceTerms terms = ComputeImportanceTerms(batch, eval, gamma, clip);
  const Vector coeff = PdisStepCoefficients(batch, terms, weights);
  Matrix dlogits = ScoreRowGradient(batch, eval, coeff);
  const StepRange entropy_steps = EntropySteps(batch, entropy_episodes);
  GradientReport report;
  report.entropy = AddEntropyRows(eval, entropy_steps.begin, entropy_steps.end,
                                  lambda, &dlogits);
  report.gradient = BackpropBatch(batch, policy, eval, dlogits);
  report.per_episode_contributions = weights.cwiseProduct(terms.pdis);
  report.objective_value =
      report.per_episode_contributions.sum() + lambda * report.entropy;
  CheckFinite(report);
  return report;
}

GradientReport ProOlsGradient(const EpisodeBatch& buffer, const Policy& policy,
                              const ObjectiveOptions& options) {
  const Vector zeta =
      ForecastWeights(buffer.num_episodes(), options.delta, options.basis);
  return WeightedPdisGradient(buffer, policy, zeta, options.gamma,
                              options.clip, options.lambda,
                              ResolveEntropyEpisodes(options));
}

GradientReport FtrlGradient(const EpisodeBatch& buffer, const Policy& policy,
                            const ObjectiveOptions& options) {
  const int k = buffer.num_episodes();
  return WeightedPdisGradient(buffer, policy,
                              Vector::Constant(k, 1.0 / k), options.gamma,
                              options.clip, options.lambda,
                              ResolveEntropyEpisodes(options));
}

GradientReport ProWlsGradient(const EpisodeBatch& buffer, const Policy& policy,
                              const ObjectiveOptions& options,
                              const ForecastDesign* design) {
  std::optional<ForecastDesign> local;
  if (design == nullptr) {
    local = MakeForecastDesign(buffer.num_episodes(), options.delta,
                               options.basis);
    design = &*local;
  }
  if (design->phi.rows() != buffer.num_episodes()) {
    throw DimensionError("forecast design does not match the buffer");
  }
  const BatchEvaluation eval = EvaluateBatch(buffer, policy);
  const ImportanceTerms terms =
      ComputeImportanceTerms(buffer, eval, options.gamma, options.clip);
  const ForecastModel model =
      FitNwis(*design, terms.returns, terms.trajectory_ratio);

  Vector coeff = Vector::Zero(buffer.num_steps());
  if (!options.stop_gradient_weights) {
    const Matrix& phi = design->phi;
    const Vector leverage =
        phi * (model.gram_inverse * model.mean_target_row.transpose());
    const Vector residual = terms.returns - phi * model.coefficients;
    for (int e = 0; e < buffer.num_episodes(); ++e) {
      const double u =
          leverage(e) * residual(e) * terms.trajectory_ratio_slope(e);
      coeff.segment(buffer.episode_begin(e), buffer.episode_length(e))
          .setConstant(u);
    }
  }
  Matrix dlogits = ScoreRowGradient(buffer, eval, coeff);
  const StepRange entropy_steps =
      EntropySteps(buffer, ResolveEntropyEpisodes(options));
  GradientReport report;
  report.entropy = AddEntropyRows(eval, entropy_steps.begin, entropy_steps.end,
                                  options.lambda, &dlogits);
  report.gradient = BackpropBatch(buffer, policy, eval, dlogits);
  report.per_episode_contributions =
      model.forecast_weights.cwiseProduct(terms.returns);
  report.objective_value =
      model.forecasts.mean() + options.lambda * report.entropy;
  CheckFinite(report);
  return report;
}

std::vector<bool> ClipPattern(const ImportanceTerms& terms) {
  std::vector<bool> pattern;
  pattern.reserve(terms.cumulative.size() + terms.trajectory_ratio.size());
  for (Eigen::Index s = 0; s < terms.cumulative.size(); ++s) {
    pattern.push_back(terms.cumulative_slope(s) == 0.0 &&
                      terms.cumulative(s) > 0.0);
  }
  for (Eigen::Index e = 0; e < terms.trajectory_ratio.size(); ++e) {
    pattern.push_back(terms.trajectory_ratio_slope(e) == 0.0 &&
                      terms.trajectory_ratio(e) > 0.0);
  }
  return pattern;
}

FiniteDifferenceResult FiniteDifferenceCheck(const ScalarObjective& objective,
                                             const Vector& theta,
                                             const Vector& analytic,
                                             double epsilon) {
  if (analytic.size() != theta.size()) {
    throw DimensionError("analytic gradient and theta differ in length");
  }
  FiniteDifferenceResult result;
  result.numeric_gradient = Vector::Zero(theta.size());
  const std::vector<bool> base_pattern = objective(theta).clip_pattern;
  Vector probe = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    probe(j) = theta(j) + epsilon;
    const ObjectiveSample plus = objective(probe);
    probe(j) = theta(j) - epsilon;
    const ObjectiveSample minus = objective(probe);
    probe(j) = theta(j);
    if (plus.clip_pattern != base_pattern ||
        minus.clip_pattern != base_pattern) {
      ++result.skipped;
      continue;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * epsilon);
    result.numeric_gradient(j) = numeric;
    const double error =
        std::abs(analytic(j) - numeric) / (std::abs(numeric) + 1e-8);
    result.max_relative_error = std::max(result.max_relative_error, error);
    ++result.checked;
  }
  return result;
}

}  // namespace prognosticator
