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

#include "prognosticator/basis.h"

#include <cmath>
#include <numbers>
#include <sstream>

namespace prognosticator {

std::string_view BasisFamilyName(BasisFamily family) {
  switch (family) {
    case BasisFamily::kFourierCosine:
      return "fourier";
    case BasisFamily::kFourierHalf:
      return "fourier_half";
    case BasisFamily::kPolynomial:
      return "polynomial";
    case BasisFamily::kIdentity:
      return "identity";
    case BasisFamily::kConstant:
      return "constant";
  }
  return "unknown";
}

BasisFamily ParseBasisFamily(std::string_view name) {
  if (name == "fourier" || name == "fourier_cosine") {
    return BasisFamily::kFourierCosine;
  }
  if (name == "fourier_half") return BasisFamily::kFourierHalf;
  if (name == "polynomial") return BasisFamily::kPolynomial;
  if (name == "identity") return BasisFamily::kIdentity;
  if (name == "constant") return BasisFamily::kConstant;
  throw ConfigError("unknown basis family '" + std::string(name) + "'");
}

TimeBasisConfig::TimeBasisConfig(BasisFamily family, int dimension,
                                 double normalization_horizon)
    : family_(family),
      dimension_(dimension),
      normalization_horizon_(normalization_horizon) {
  if (family_ == BasisFamily::kIdentity) dimension_ = 2;
  if (family_ == BasisFamily::kConstant) dimension_ = 1;
  if (dimension_ < 1) {
    throw DomainError("basis dimension must be >= 1, got " +
                      std::to_string(dimension));
  }
  if (!(normalization_horizon_ >= 1.0) ||
      !std::isfinite(normalization_horizon_)) {
    throw DomainError("normalization horizon must be >= 1");
  }
}

std::string TimeBasisConfig::ToString() const {
  std::ostringstream out;
  out << BasisFamilyName(family_) << "(d=" << dimension_
      << ", horizon=" << normalization_horizon_ << ")";
  return out.str();
}

RowVector EncodeNormalized(double x, BasisFamily family, int dimension) {
  switch (family) {
    case BasisFamily::kFourierCosine:
    case BasisFamily::kFourierHalf: {
      const double base = family == BasisFamily::kFourierCosine
                              ? 2.0 * std::numbers::pi
                              : std::numbers::pi;
      RowVector row(dimension);
      for (int n = 1; n < dimension; ++n) row(n - 1) = std::cos(base * n * x);
      row(dimension - 1) = 1.0;
      return row;
    }
    case BasisFamily::kPolynomial: {
      RowVector row(dimension);
      double power = 1.0;
      for (int j = dimension - 1; j >= 0; --j) {
        row(j) = power;
        power *= x;
      }
      return row;
    }
    case BasisFamily::kIdentity: {
      RowVector row(2);
      row << x, 1.0;
      return row;
    }
    case BasisFamily::kConstant:
      return RowVector::Ones(1);
  }
  throw DomainError("unknown basis family");
}

RowVector EncodeTime(long index, const TimeBasisConfig& config) {
  if (index < 1) {
    throw DomainError("episode index must be >= 1, got " +
                      std::to_string(index));
  }
  const double x = config.family() == BasisFamily::kIdentity
                       ? static_cast<double>(index)
                       : static_cast<double>(index) /
                             config.normalization_horizon();
  return EncodeNormalized(x, config.family(), config.dimension());
}

Matrix BasisMatrix(std::span<const long> indices,
                   const TimeBasisConfig& config) {
  if (indices.empty()) throw DomainError("basis matrix needs indices");
  Matrix phi(static_cast<Eigen::Index>(indices.size()), config.dimension());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw DomainError("basis matrix indices must be strictly increasing");
    }
    phi.row(static_cast<Eigen::Index>(i)) = EncodeTime(indices[i], config);
  }
  return phi;
}

Matrix BasisMatrix(long k, const TimeBasisConfig& config) {
  if (k < 1) throw DomainError("basis matrix needs k >= 1");
  Matrix phi(k, config.dimension());
  for (long i = 1; i <= k; ++i) phi.row(i - 1) = EncodeTime(i, config);
  return phi;
}

}  // namespace prognosticator
