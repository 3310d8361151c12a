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

// Time-index features for the performance regressions. Every family ends in
// a constant 1 column so the regression always has an intercept.

#ifndef PROGNOSTICATOR_BASIS_H_
#define PROGNOSTICATOR_BASIS_H_

#include <span>
#include <string>
#include <string_view>

#include "prognosticator/linalg.h"

namespace prognosticator {

enum class BasisFamily {
  kFourierCosine,
  kFourierHalf,
  kPolynomial,
  kIdentity,
  kConstant,
};

std::string_view BasisFamilyName(BasisFamily family);
// Accepts "fourier", "fourier_cosine", "fourier_half", "polynomial",
// "identity", "constant".
BasisFamily ParseBasisFamily(std::string_view name);

class TimeBasisConfig {
 public:
  // Identity always has dimension 2 and Constant dimension 1, whatever
  // `dimension` says. Throws DomainError on dimension < 1 or horizon < 1.
  TimeBasisConfig(BasisFamily family, int dimension,
                  double normalization_horizon = 1.0);

  BasisFamily family() const { return family_; }
  int dimension() const { return dimension_; }
  double normalization_horizon() const { return normalization_horizon_; }

  TimeBasisConfig WithHorizon(double normalization_horizon) const {
    return TimeBasisConfig(family_, dimension_, normalization_horizon);
  }

  std::string ToString() const;

 private:
  BasisFamily family_;
  int dimension_;
  double normalization_horizon_;
};

// Feature row at normalized time `x` (already divided by the horizon).
// FourierCosine: [cos(2 pi x), ..., cos(2 pi (d-1) x), 1].
// FourierHalf:   [cos(pi x), ..., cos(pi (d-1) x), 1]. Period 2, so the
//                history x in (0, 1] is one half-period and the fit is
//                not forced to be symmetric about x = 1/2.
// Polynomial:    [x^(d-1), ..., x, 1].
// Identity treats `x` as the raw index: [x, 1]. Constant: [1].
RowVector EncodeNormalized(double x, BasisFamily family, int dimension);

// phi(index). Identity is left unnormalized; the other families use
// index / normalization_horizon. Throws DomainError for index < 1.
RowVector EncodeTime(long index, const TimeBasisConfig& config);

// Rows phi(indices[i]). Indices must be nonempty and strictly increasing.
Matrix BasisMatrix(std::span<const long> indices,
                   const TimeBasisConfig& config);

// Rows phi(1), ..., phi(k).
Matrix BasisMatrix(long k, const TimeBasisConfig& config);

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_BASIS_H_
