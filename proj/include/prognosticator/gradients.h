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

// Parameter gradients of the forecast objectives.
//
// The OLS forecast is linear in the per-episode PDIS estimates, so its
// gradient is a zeta-weighted sum of PDIS gradients. Each PDIS gradient is
// sum_t score_t * (sum_{l>=t} rho(0,l) gamma^l r_l), i.e. every step's score
// is scaled by a suffix sum; all steps of all episodes are then pushed through
// one Policy::Backprop call.
//
// The WLS forecast depends on theta only through the episode weights
// L_ii = rho_i. With M = Phi^T L Phi and w = M^-1 Phi^T L G,
//
//   d forecast / d L_ii = (phibar M^-1 phi_i^T) (G_i - phi_i w),
//   d L_ii / d theta    = rho_i sum_t score_t.

#ifndef PROGNOSTICATOR_GRADIENTS_H_
#define PROGNOSTICATOR_GRADIENTS_H_

#include <functional>
#include <optional>
#include <vector>

#include "prognosticator/basis.h"
#include "prognosticator/estimators.h"
#include "prognosticator/policy.h"
#include "prognosticator/trajectory.h"

namespace prognosticator {

struct GradientReport {
  Vector gradient;
  double objective_value = 0.0;
  // Each episode's share of the (non-entropy) objective.
  Vector per_episode_contributions;
  double entropy = 0.0;
};

struct ObjectiveOptions {
  double gamma = 0.99;
  std::optional<double> clip = 10.0;
  TimeBasisConfig basis{BasisFamily::kFourierCosine, 5};
  int delta = 3;
  double lambda = 0.0;
  // The entropy bonus averages over states of this many most recent episodes;
  // 0 means `delta`.
  int entropy_episodes = 0;
  // Treat the WLS weights as constants (ablation). The WLS targets do not
  // depend on theta, so only the entropy term is left.
  bool stop_gradient_weights = false;
};

// d PDIS / d theta for the first episode of `trajectory`.
Vector PdisGradient(const EpisodeBatch& trajectory, const Policy& policy,
                    double gamma, std::optional<double> clip);

// Objective sum_i weights_i PDIS_i + lambda H over the batch.
GradientReport WeightedPdisGradient(const EpisodeBatch& batch,
                                    const Policy& policy,
                                    const Vector& weights, double gamma,
                                    std::optional<double> clip, double lambda,
                                    int entropy_episodes);

// Mean NIS forecast over the next delta episodes plus lambda H.
GradientReport ProOlsGradient(const EpisodeBatch& buffer, const Policy& policy,
                              const ObjectiveOptions& options);

// Mean NWIS forecast over the next delta episodes plus lambda H. `design`,
// if given, must match the buffer size, options.delta and options.basis.
GradientReport ProWlsGradient(const EpisodeBatch& buffer, const Policy& policy,
                              const ObjectiveOptions& options,
                              const ForecastDesign* design = nullptr);

// Mean PDIS over the whole batch plus lambda H.
GradientReport FtrlGradient(const EpisodeBatch& buffer, const Policy& policy,
                            const ObjectiveOptions& options);

// Which cumulative and whole-episode ratios are currently clipped.
std::vector<bool> ClipPattern(const ImportanceTerms& terms);

struct ObjectiveSample {
  double value = 0.0;
  // Clip activation at this theta; coordinates whose perturbation changes it
  // are not compared. Leave empty for smooth objectives.
  std::vector<bool> clip_pattern;
};

using ScalarObjective = std::function<ObjectiveSample(const Vector& theta)>;

struct FiniteDifferenceResult {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped = 0;
  Vector numeric_gradient;
};

// Central differences per coordinate; relative error is
// |analytic - numeric| / (|numeric| + 1e-8).
FiniteDifferenceResult FiniteDifferenceCheck(const ScalarObjective& objective,
                                             const Vector& theta,
                                             const Vector& analytic,
                                             double epsilon = 1e-5);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_GRADIENTS_H_
