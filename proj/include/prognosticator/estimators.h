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

// Counter-factual evaluation of a target policy on logged episodes, and
// forecasts of its future performance.
//
// Past performance of episode i is estimated with per-decision importance
// sampling (PDIS). The forecast regresses those estimates on time features
// phi(i) and evaluates the fit at the next delta episodes:
//
//   NIS:  J(k+D) = phi(k+D) (Phi^T Phi)^-1 Phi^T Y,         Y_i = PDIS_i
//   NWIS: J(k+D) = phi(k+D) (Phi^T L Phi)^-1 Phi^T L G,     L_ii = rho_i
//
// where G_i is the discounted return and rho_i the importance ratio of the
// whole episode. Cumulative ratio products are clipped at `clip` when one is
// given; a clipped product is treated as a constant when differentiating.

#ifndef PROGNOSTICATOR_ESTIMATORS_H_
#define PROGNOSTICATOR_ESTIMATORS_H_

#include <optional>
#include <span>

#include "prognosticator/basis.h"
#include "prognosticator/policy.h"
#include "prognosticator/trajectory.h"

namespace prognosticator {

// Importance quantities for every step and episode of a batch, for one
// target policy.
struct ImportanceTerms {
  // Per step. `cumulative` is min(prod_{l<=t} pi/beta, clip) within the
  // episode; `cumulative_slope` equals it where unclipped and is 0 where the
  // clip is active (the derivative factor of the product).
  Vector cumulative;
  Vector cumulative_slope;
  Vector discount;  // gamma^t
  // Per episode.
  Vector pdis;
  Vector trajectory_ratio;
  Vector trajectory_ratio_slope;
  Vector returns;
};

// A policy evaluated on a batch. When the batch carries a state table at most
// half as long as the batch, the policy runs once per distinct state and
// steps refer to table rows; otherwise there is one row per step.
struct BatchEvaluation {
  PolicyEvaluation rows;
  std::span<const int> step_rows;  // empty: step s is row s
  Vector chosen_probs;             // per step, pi(a_s | s_s)

  bool compressed() const { return !step_rows.empty(); }
  Eigen::Index row(Eigen::Index step) const {
    return step_rows.empty() ? step : step_rows[step];
  }
};

BatchEvaluation EvaluateBatch(const EpisodeBatch& batch, const Policy& policy);

// Score term sum_s coeff_s (e_{a_s} - pi(.|s_s)) accumulated onto the rows
// of `evaluation`.
Matrix ScoreRowGradient(const EpisodeBatch& batch,
                        const BatchEvaluation& evaluation, const Vector& coeff);

// Mean entropy over steps [begin, end) of the batch. When `row_gradient` is
// non-null, lambda * dH/dlogits is added to it row by row.
double AddEntropyRows(const BatchEvaluation& evaluation, Eigen::Index begin,
                      Eigen::Index end, double lambda, Matrix* row_gradient);

// Parameter gradient of sum_r row_gradient.row(r) . logits(row r).
Vector BackpropBatch(const EpisodeBatch& batch, const Policy& policy,
                     const BatchEvaluation& evaluation,
                     const Matrix& row_gradient);

ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const BatchEvaluation& evaluation,
                                       double gamma,
                                       std::optional<double> clip);

// `evaluation` must be the target policy evaluated on batch.states().
// Throws DataCorruptionError if a behavior probability is not in (0, 1].
ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const PolicyEvaluation& evaluation,
                                       double gamma,
                                       std::optional<double> clip);

ImportanceTerms ComputeImportanceTerms(const EpisodeBatch& batch,
                                       const Policy& policy, double gamma,
                                       std::optional<double> clip);

// PDIS estimate of the first episode in `trajectory`.
double PdisEstimate(const EpisodeBatch& trajectory, const Policy& policy,
                    double gamma, std::optional<double> clip);

// Clipped importance ratio of the whole (first) episode.
double TrajectoryRatio(const EpisodeBatch& trajectory, const Policy& policy,
                       std::optional<double> clip);

struct ForecastModel {
  TimeBasisConfig basis{BasisFamily::kConstant, 1};  // horizon k + delta
  bool weighted = false;
  Matrix gram_inverse;         // (Phi^T Phi)^-1 or (Phi^T L Phi)^-1
  RowVector mean_target_row;   // (1/delta) sum_D phi(k + D)
  Vector forecast_weights;     // zeta: d mean-forecast / d Y_i
  Vector coefficients;         // w or w-double-dagger; empty until fitted
  Vector forecasts;            // phi(k + D) w for D = 1..delta
};

// Phi over episodes 1..k and the mean target row, with the basis normalized
// by k + delta. Depends only on (k, delta, basis), so one update can reuse it
// across inner iterations.
struct ForecastDesign {
  TimeBasisConfig basis{BasisFamily::kConstant, 1};
  int delta = 1;
  Matrix phi;
  RowVector mean_target_row;
};

// Needs k >= d.
ForecastDesign MakeForecastDesign(long k, int delta,
                                  const TimeBasisConfig& basis);

// Weights zeta_i = (1/delta) sum_D [phi(k+D) (Phi^T Phi)^-1 Phi^T]_i over
// indices 1..k with the basis normalized by k + delta. Needs k >= d.
ForecastModel OlsForecastModel(long k, int delta,
                               const TimeBasisConfig& basis);

Vector ForecastWeights(long k, int delta, const TimeBasisConfig& basis);

// Fits Y (one value per episode 1..k) by OLS and forecasts delta steps.
ForecastModel FitNis(const Vector& targets, int delta,
                     const TimeBasisConfig& basis);

// Fits Y by least squares with row weights. Throws DegenerateWeightsError
// when every weight is zero.
ForecastModel FitNwis(const Vector& targets, const Vector& weights, int delta,
                      const TimeBasisConfig& basis);
ForecastModel FitNwis(const ForecastDesign& design, const Vector& targets,
                      const Vector& weights);

// NIS forecasts phi(k+D) w, D = 1..delta, for the whole batch.
Vector NisForecast(const EpisodeBatch& buffer, const Policy& policy,
                   double gamma, std::optional<double> clip,
                   const TimeBasisConfig& basis, int delta);

// NWIS forecasts phi(k+D) w-double-dagger, D = 1..delta.
Vector NwisForecast(const EpisodeBatch& buffer, const Policy& policy,
                    double gamma, std::optional<double> clip,
                    const TimeBasisConfig& basis, int delta);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_ESTIMATORS_H_
