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

// Small dense linear algebra for the forecasting regressions. The systems
// solved here are d x d with d <= 16, so everything goes through the normal
// equations and a Cholesky factorization with a pseudo-inverse fallback.

#ifndef PROGNOSTICATOR_LINALG_H_
#define PROGNOSTICATOR_LINALG_H_

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "prognosticator/errors.h"

namespace prognosticator {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = RowVectorX<double>;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace internal {

inline std::string ShapeString(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
bool AllFinite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

}  // namespace internal

// Checked product. Eigen only asserts on shape mismatch; callers here get a
// DimensionError instead.
template <typename A, typename B>
MatrixX<typename A::Scalar> Multiply(const Eigen::MatrixBase<A>& a,
                                     const Eigen::MatrixBase<B>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("cannot multiply " +
                         internal::ShapeString(a.rows(), a.cols()) + " by " +
                         internal::ShapeString(b.rows(), b.cols()));
  }
  return a * b;
}

template <typename A>
MatrixX<typename A::Scalar> Transpose(const Eigen::MatrixBase<A>& a) {
  return a.transpose();
}

// diag(weights) * a, i.e. row i of `a` scaled by weights(i).
template <typename A, typename W>
MatrixX<typename A::Scalar> ScaleRows(const Eigen::MatrixBase<A>& a,
                                      const Eigen::MatrixBase<W>& weights) {
  if (weights.size() != a.rows()) {
    throw DimensionError("row weights of length " +
                         std::to_string(weights.size()) + " for " +
                         internal::ShapeString(a.rows(), a.cols()) +
                         " matrix");
  }
  return weights.asDiagonal() * a;
}

// Factorization of a symmetric positive (semi-)definite Gram matrix.
//
// Columns are equilibrated to unit diagonal and factored by Cholesky. A pivot
// below kRankTolerance marks the matrix rank deficient (an aliased Fourier
// design, a repeated column); it is then factored by a symmetric eigen
// decomposition and Solve() applies the pseudo-inverse restricted to
// eigenvalues above kRankTolerance * the largest one. Solutions of consistent
// systems are then exact least-squares solutions rather than ridge-biased
// ones. A zero or non-finite Gram matrix is a SingularityError.
template <typename Scalar>
class GramFactorization {
 public:
  static constexpr Scalar kRankTolerance = Scalar(1e-10);

  explicit GramFactorization(const MatrixX<Scalar>& gram) {
    if (gram.rows() != gram.cols() || gram.rows() == 0) {
      throw DimensionError("Gram matrix must be square and nonempty, got " +
                           internal::ShapeString(gram.rows(), gram.cols()));
    }
    if (!gram.allFinite()) {
      throw SingularityError("Gram matrix has non-finite entries");
    }
    const Eigen::Index d = gram.rows();
    scale_.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Scalar g = gram(j, j);
      if (g < Scalar(0)) throw SingularityError("negative Gram diagonal");
      // A zero column stays zero; the pseudo-inverse path drops it.
      scale_(j) = g > Scalar(0) ? Scalar(1) / std::sqrt(g) : Scalar(1);
    }
    const MatrixX<Scalar> equilibrated =
        scale_.asDiagonal() * gram * scale_.asDiagonal();
    llt_.compute(equilibrated);
    if (llt_.info() == Eigen::Success &&
        (llt_.matrixLLT().diagonal().array().square() > kRankTolerance)
            .all()) {
      return;
    }
    rank_deficient_ = true;
    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(equilibrated);
    const VectorX<Scalar>& values = eig.eigenvalues();
    const Scalar top = values.maxCoeff();
    if (!(top > Scalar(0))) throw SingularityError("Gram matrix is zero");
    VectorX<Scalar> inverse_values(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      inverse_values(j) =
          values(j) > kRankTolerance * top ? Scalar(1) / values(j) : Scalar(0);
    }
    pseudo_inverse_ = eig.eigenvectors() * inverse_values.asDiagonal() *
                      eig.eigenvectors().transpose();
  }

  Eigen::Index dim() const { return scale_.size(); }
  bool rank_deficient() const { return rank_deficient_; }

  template <typename Rhs>
  MatrixX<Scalar> Solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    if (rhs.rows() != dim()) {
      throw DimensionError("right-hand side has " +
                           std::to_string(rhs.rows()) + " rows, expected " +
                           std::to_string(dim()));
    }
    MatrixX<Scalar> scaled = scale_.asDiagonal() * rhs;
    if (rank_deficient_) return scale_.asDiagonal() * (pseudo_inverse_ * scaled);
    return scale_.asDiagonal() * llt_.solve(scaled);
  }

  VectorX<Scalar> SolveVector(const VectorX<Scalar>& rhs) const {
    return Solve(rhs).col(0);
  }

  MatrixX<Scalar> Inverse() const {
    MatrixX<Scalar> inv =
        Solve(MatrixX<Scalar>::Identity(dim(), dim()).eval());
    // Symmetrize away the rounding asymmetry of the two triangular solves.
    return (inv + inv.transpose()) / Scalar(2);
  }

 private:
  Eigen::LLT<MatrixX<Scalar>> llt_;
  MatrixX<Scalar> pseudo_inverse_;
  VectorX<Scalar> scale_;
  bool rank_deficient_ = false;
};

// argmin_c sum_i w_i (y_i - c^T phi_i)^2 via the normal equations
// (Phi^T W Phi) c = Phi^T W y. Unweighted when `row_weights` is null.
template <typename Scalar>
VectorX<Scalar> SolveLeastSquares(const MatrixX<Scalar>& design,
                                  const VectorX<Scalar>& targets,
                                  const VectorX<Scalar>* row_weights = nullptr) {
  const Eigen::Index k = design.rows();
  const Eigen::Index d = design.cols();
  if (targets.size() != k) {
    throw DimensionError("targets of length " +
                         std::to_string(targets.size()) + " for design " +
                         internal::ShapeString(k, d));
  }
  if (k < d) {
    throw DimensionError("underdetermined least squares: " +
                         internal::ShapeString(k, d));
  }
  if (row_weights == nullptr) {
    const GramFactorization<Scalar> gram(
        (design.transpose() * design).eval());
    return gram.SolveVector(design.transpose() * targets);
  }
  if (row_weights->size() != k) {
    throw DimensionError("row weights of length " +
                         std::to_string(row_weights->size()) +
                         " for design " + internal::ShapeString(k, d));
  }
  if ((row_weights->array() < Scalar(0)).any()) {
    throw DomainError("row weights must be nonnegative");
  }
  if (!(row_weights->sum() > Scalar(0))) {
    throw DegenerateWeightsError("all row weights are zero");
  }
  const MatrixX<Scalar> weighted = row_weights->asDiagonal() * design;
  const GramFactorization<Scalar> gram(
      (design.transpose() * weighted).eval());
  return gram.SolveVector(weighted.transpose() * targets);
}

extern template class GramFactorization<double>;

}  // namespace prognosticator

#endif  // PROGNOSTICATOR_LINALG_H_
