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


#include "prognosticator/linalg.h"

#include <gtest/gtest.h>

#include <random>

#include "prognosticator/errors.h"

namespace prognosticator {
namespace {

TEST(MultiplyTest, IdentityTimesVector) {
  Vector x(2);
  x << 3, 4;
  const Matrix y = Multiply(Matrix::Identity(2, 2), x);
  EXPECT_EQ(y(0, 0), 3);
  EXPECT_EQ(y(1, 0), 4);
}

TEST(MultiplyTest, ShapeMismatchThrows) {
  EXPECT_THROW(Multiply(Matrix::Ones(2, 3), Matrix::Ones(2, 3)),
               DimensionError);
}

TEST(TransposeTest, TwoByTwo) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  Matrix expected(2, 2);
  expected << 1, 3, 2, 4;
  EXPECT_EQ(Transpose(a), expected);
}

TEST(ScaleRowsTest, DiagonalScalesEachRow) {
  Vector w(2);
  w << 2, 3;
  Matrix expected(2, 2);
  expected << 2, 2, 3, 3;
  EXPECT_EQ(ScaleRows(Matrix::Ones(2, 2), w), expected);
  EXPECT_THROW(ScaleRows(Matrix::Ones(3, 2), w), DimensionError);
}

Matrix LineDesign() {
  Matrix design(3, 2);
  design << 1, 1, 2, 1, 3, 1;
  return design;
}

TEST(SolveLeastSquaresTest, ExactLinearFit) {
  Vector y(3);
  y << 2, 4, 6;
  const Vector c = SolveLeastSquares(LineDesign(), y);
  EXPECT_NEAR(c(0), 2.0, 1e-12);
  EXPECT_NEAR(c(1), 0.0, 1e-12);
}

TEST(SolveLeastSquaresTest, WeightedConstantIsWeightedMean) {
  const Matrix design = Matrix::Ones(2, 1);
  Vector y(2), w(2);
  y << 2, 6;
  w << 1, 3;
  const Vector c = SolveLeastSquares(design, y, &w);
  EXPECT_NEAR(c(0), 5.0, 1e-12);
}

TEST(SolveLeastSquaresTest, ConstantTargets) {
  const Vector y = Vector::Constant(3, -1.75);
  EXPECT_NEAR(SolveLeastSquares(Matrix::Ones(3, 1).eval(), y)(0), -1.75,
              1e-14);
}

TEST(SolveLeastSquaresTest, ErrorCases) {
  Vector y(3);
  y << 1, 2, 3;
  Vector zero = Vector::Zero(3);
  EXPECT_THROW(SolveLeastSquares(LineDesign(), y, &zero),
               DegenerateWeightsError);
  Vector negative(3);
  negative << 1, -1, 1;
  EXPECT_THROW(SolveLeastSquares(LineDesign(), y, &negative), DomainError);
  EXPECT_THROW(SolveLeastSquares(LineDesign(), Vector(Vector::Ones(2))),
               DimensionError);
  EXPECT_THROW(SolveLeastSquares(Matrix(Matrix::Ones(1, 2)),
                                 Vector(Vector::Ones(1))),
               DimensionError);
}

TEST(SolveLeastSquaresTest, RepeatedColumnUsesPseudoInverse) {
  Matrix design(3, 2);
  design << 1, 1, 1, 1, 1, 1;
  const Vector y = Vector::Constant(3, 2.0);
  const Vector c = SolveLeastSquares(design, y);
  // Any split of 2 between the two identical columns fits; the minimum-norm
  // one is the even split.
  EXPECT_NEAR((design * c - y).norm(), 0.0, 1e-12);
  EXPECT_NEAR(c(0), 1.0, 1e-12);
  EXPECT_NEAR(c(1), 1.0, 1e-12);
  GramFactorization<double> gram((design.transpose() * design).eval());
  EXPECT_TRUE(gram.rank_deficient());
}

TEST(GramFactorizationTest, FullRankTakesCholeskyPath) {
  Matrix gram(2, 2);
  gram << 4, 1, 1, 3;
  const GramFactorization<double> f(gram);
  EXPECT_FALSE(f.rank_deficient());
  EXPECT_LT((f.Inverse() * gram - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(GramFactorizationTest, ZeroMatrixIsSingular) {
  EXPECT_THROW(GramFactorization<double>(Matrix::Zero(2, 2).eval()),
               SingularityError);
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = std::nan("");
  EXPECT_THROW(GramFactorization<double>{nan}, SingularityError);
}

TEST(GramFactorizationTest, InverseIsSymmetric) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Matrix a(20, 5);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  const GramFactorization<double> gram((a.transpose() * a).eval());
  const Matrix inv = gram.Inverse();
  EXPECT_LT((inv - inv.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((inv * (a.transpose() * a) - Matrix::Identity(5, 5))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

class LeastSquaresPropertyTest : public ::testing::TestWithParam<int> {};

TEST_P(LeastSquaresPropertyTest, ResidualsAreOrthogonal) {
  std::mt19937_64 rng(GetParam());
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.1, 2.0);
  const int k = 30, d = 4;
  Matrix design(k, d);
  Vector y(k), w(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < d; ++j) design(i, j) = normal(rng);
    y(i) = normal(rng);
    w(i) = uniform(rng);
  }
  const Vector c = SolveLeastSquares(design, y, &w);
  const Vector normal_residual =
      design.transpose() * w.asDiagonal() * (y - design * c);
  EXPECT_LT(normal_residual.cwiseAbs().maxCoeff(), 1e-8);

  const Vector ones = Vector::Ones(k);
  const Vector unit = SolveLeastSquares(design, y, &ones);
  const Vector plain = SolveLeastSquares(design, y);
  EXPECT_LT((unit - plain).cwiseAbs().maxCoeff(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Seeds, LeastSquaresPropertyTest,
                         ::testing::Range(0, 10));

TEST(SolveLeastSquaresTest, RepeatedSolveIsBitwiseIdentical) {
  Vector y(3);
  y << 2, 4, 6;
  const Vector a = SolveLeastSquares(LineDesign(), y);
  const Vector b = SolveLeastSquares(LineDesign(), y);
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()), 0);
}

}  // namespace
}  // namespace prognosticator
