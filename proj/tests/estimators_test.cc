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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "prognosticator/checks.h"
#include "prognosticator/envs.h"
#include "prognosticator/errors.h"
#include "prognosticator/policy.h"
#include "prognosticator/trajectory.h"

namespace prognosticator {
namespace {

// Uniform two-action policy on the single state [1], so pi(a|s) = 0.5 and
// the ratio of a step is 0.5 / behavior_prob.
const SoftmaxLinearPolicy& Uniform() {
  static const SoftmaxLinearPolicy policy(2, 1);
  return policy;
}

Trajectory Episode(long index, std::vector<double> ratios,
                   std::vector<double> rewards) {
  Trajectory traj(index, 1);
  for (std::size_t t = 0; t < ratios.size(); ++t) {
    traj.AddStep(Vector::Ones(1), static_cast<int>(t % 2), 0.5 / ratios[t],
                 rewards[t]);
  }
  return traj;
}

TEST(PdisTest, OnPolicyEqualsDiscountedReturn) {
  Rng rng(4);
  Vector theta(6);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 6; ++i) theta(i) = normal(rng);
  SoftmaxLinearPolicy policy(3, 2, theta);
  Trajectory traj(1, 2);
  std::vector<double> rewards;
  for (int t = 0; t < 5; ++t) {
    Vector s(2);
    s << normal(rng), normal(rng);
    const SampledAction a = policy.SampleAction(s, rng);
    rewards.push_back(normal(rng));
    traj.AddStep(s, a.action, a.probability, rewards.back());
  }
  EXPECT_NEAR(PdisEstimate(traj.View(), policy, 0.9, std::nullopt),
              DiscountedReturn(rewards, 0.9), 1e-12);
}

TEST(PdisTest, SingleStepRatioTwo) {
  const Trajectory traj = Episode(1, {2.0}, {2.0});
  EXPECT_NEAR(PdisEstimate(traj.View(), Uniform(), 0.99, std::nullopt), 4.0,
              1e-14);
}

TEST(PdisTest, TwoStepsHandExpansion) {
  const Trajectory traj = Episode(1, {2.0, 0.5}, {1.0, 4.0});
  // 2 * 1 + (2 * 0.5) * 0.5 * 4
  EXPECT_NEAR(PdisEstimate(traj.View(), Uniform(), 0.5, std::nullopt), 4.0,
              1e-14);
}

TEST(PdisTest, ClipAppliesToCumulativeProduct) {
  const Trajectory traj = Episode(1, {4.0, 5.0}, {1.0, 1.0});
  // 4 * 1 + min(20, 10) * 1
  EXPECT_NEAR(PdisEstimate(traj.View(), Uniform(), 1.0, 10.0), 14.0, 1e-12);
  EXPECT_NEAR(PdisEstimate(traj.View(), Uniform(), 1.0, std::nullopt), 24.0,
              1e-12);
}

TEST(TrajectoryRatioTest, Examples) {
  EXPECT_NEAR(TrajectoryRatio(Episode(1, {1.0, 1.0}, {0, 0}).View(),
                              Uniform(), std::nullopt),
              1.0, 1e-15);
  EXPECT_NEAR(
      TrajectoryRatio(Episode(1, {4.0, 5.0}, {0, 0}).View(), Uniform(), 10.0),
      10.0, 1e-15);
  EXPECT_NEAR(TrajectoryRatio(Episode(1, {0.5, 0.5}, {0, 0}).View(),
                              Uniform(), std::nullopt),
              0.25, 1e-15);
}

TEST(ImportanceTermsTest, ClippedStepsHaveZeroSlope) {
  // Raw products 4, 20, 10, 5; the clip caps what is reported, not the
  // running product.
  const Trajectory traj = Episode(1, {4.0, 5.0, 0.5, 0.5}, {1, 1, 1, 1});
  const ImportanceTerms terms =
      ComputeImportanceTerms(traj.View(), Uniform(), 1.0, 10.0);
  EXPECT_NEAR(terms.cumulative(0), 4.0, 1e-14);
  EXPECT_NEAR(terms.cumulative_slope(0), 4.0, 1e-14);
  EXPECT_NEAR(terms.cumulative(1), 10.0, 1e-14);
  EXPECT_EQ(terms.cumulative_slope(1), 0.0);
  // Raw product 10 is not above the clip.
  EXPECT_NEAR(terms.cumulative(2), 10.0, 1e-14);
  EXPECT_NEAR(terms.cumulative_slope(2), 10.0, 1e-14);
  EXPECT_NEAR(terms.cumulative(3), 5.0, 1e-14);
  EXPECT_NEAR(terms.trajectory_ratio(0), 5.0, 1e-14);
}

TEST(ImportanceTermsTest, ZeroBehaviorProbabilityIsCorruption) {
  const std::vector<double> states{1.0};
  const std::vector<int> actions{0};
  const std::vector<double> probs{0.0};
  const std::vector<double> log_probs{-std::numeric_limits<double>::infinity()};
  const std::vector<double> rewards{1.0};
  const std::vector<std::size_t> offsets{0, 1};
  const EpisodeBatch batch(1, 1, states, actions, probs, log_probs, rewards,
                           offsets);
  EXPECT_THROW(PdisEstimate(batch, Uniform(), 0.9, std::nullopt),
               DataCorruptionError);
}

TEST(ForecastWeightsTest, IdentityByHand) {
  // Gram = [[14, 6], [6, 3]], target row [4, 1].
  const Vector zeta =
      ForecastWeights(3, 1, TimeBasisConfig(BasisFamily::kIdentity, 2));
  ASSERT_EQ(zeta.size(), 3);
  EXPECT_NEAR(zeta(0), -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(zeta(1), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(zeta(2), 4.0 / 3.0, 1e-12);
}

TEST(ForecastWeightsTest, ConstantIsUniform) {
  for (long k : {1L, 4L, 37L}) {
    for (int delta : {1, 3, 5}) {
      const Vector zeta =
          ForecastWeights(k, delta, TimeBasisConfig(BasisFamily::kConstant, 1));
      EXPECT_LT((zeta - Vector::Constant(k, 1.0 / k)).cwiseAbs().maxCoeff(),
                1e-14);
    }
  }
}

TEST(ForecastWeightsTest, TooFewEpisodesThrows) {
  EXPECT_THROW(
      ForecastWeights(2, 1, TimeBasisConfig(BasisFamily::kPolynomial, 3)),
      DimensionError);
}

// Independent oracle: least squares through a QR factorization of Phi.
Vector QrForecastWeights(long k, int delta, const TimeBasisConfig& basis) {
  const TimeBasisConfig c =
      basis.WithHorizon(static_cast<double>(k + delta));
  Matrix phi(k, c.dimension());
  for (long i = 1; i <= k; ++i) phi.row(i - 1) = EncodeTime(i, c);
  RowVector target = RowVector::Zero(c.dimension());
  for (int d = 1; d <= delta; ++d) target += EncodeTime(k + d, c);
  target /= delta;
  // zeta^T = target (Phi^T Phi)^-1 Phi^T = target * pinv(Phi).
  const Matrix pinv =
      Eigen::CompleteOrthogonalDecomposition<Matrix>(phi).pseudoInverse();
  return (target * pinv).transpose();
}

struct WeightCase {
  BasisFamily family;
  int d;
};

class ForecastWeightsPropertyTest
    : public ::testing::TestWithParam<WeightCase> {};

TEST_P(ForecastWeightsPropertyTest, SumToOneAndMatchQr) {
  const auto [family, d] = GetParam();
  const TimeBasisConfig basis(family, d);
  for (long k : {10L, 20L, 99L}) {
    for (int delta : {1, 3, 5}) {
      // At x = 1 every full-period cosine is 1; once 2(d - 1) >= k + delta - 1
      // the design satisfies 1 + 2 sum_n cos(2 pi n x) = 0 on the fitted
      // points but not at the target, so the forecast is not identifiable.
      if (family == BasisFamily::kFourierCosine &&
          2 * (d - 1) >= k + delta - 1) {
        continue;
      }
      const Vector zeta = ForecastWeights(k, delta, basis);
      EXPECT_NEAR(zeta.sum(), 1.0, 1e-8) << basis.ToString() << " k=" << k;
      const Vector oracle = QrForecastWeights(k, delta, basis);
      EXPECT_LT((zeta - oracle).cwiseAbs().maxCoeff(),
                1e-7 * std::max(1.0, oracle.cwiseAbs().maxCoeff()))
          << basis.ToString() << " k=" << k << " delta=" << delta;
    }
  }
}

TEST(ForecastWeightsTest, AliasedCosineDesignIsNotIdentifiable) {
  // k = 10, delta = 1: frequencies 5 and 6 alias and the cosines sum to -1/2
  // on indices 1..10, yet to 6 at the target index 11.
  const TimeBasisConfig basis(BasisFamily::kFourierCosine, 7);
  const Vector zeta = ForecastWeights(10, 1, basis);
  EXPECT_TRUE(zeta.allFinite());
  EXPECT_GT(std::abs(zeta.sum() - 1.0), 0.1);
}

INSTANTIATE_TEST_SUITE_P(
    Bases, ForecastWeightsPropertyTest,
    ::testing::Values(WeightCase{BasisFamily::kConstant, 1},
                      WeightCase{BasisFamily::kIdentity, 2},
                      WeightCase{BasisFamily::kPolynomial, 3},
                      WeightCase{BasisFamily::kPolynomial, 5},
                      WeightCase{BasisFamily::kFourierCosine, 3},
                      WeightCase{BasisFamily::kFourierCosine, 5},
                      WeightCase{BasisFamily::kFourierCosine, 7},
                      WeightCase{BasisFamily::kFourierHalf, 3},
                      WeightCase{BasisFamily::kFourierHalf, 5}));

TEST(ForecastWeightsTest, IdentityIsAffineAndChangesSign) {
  const Vector zeta =
      ForecastWeights(99, 1, TimeBasisConfig(BasisFamily::kIdentity, 2));
  EXPECT_LT(zeta(0), 0.0);
  EXPECT_GT(zeta(98), 0.0);
  const double step = zeta(1) - zeta(0);
  for (int i = 1; i < 98; ++i) {
    EXPECT_NEAR(zeta(i + 1) - zeta(i), step, 1e-12);
  }
}

TEST(ForecastModelTest, GramInverseIsSymmetric) {
  const ForecastModel model = OlsForecastModel(
      40, 3, TimeBasisConfig(BasisFamily::kFourierCosine, 5));
  const Matrix& g = model.gram_inverse;
  EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitNisTest, ConstantTargetsForecastConstant) {
  for (BasisFamily f : {BasisFamily::kFourierCosine, BasisFamily::kPolynomial,
                        BasisFamily::kConstant}) {
    const ForecastModel model =
        FitNis(Vector::Constant(12, 0.7), 3, TimeBasisConfig(f, 3));
    ASSERT_EQ(model.forecasts.size(), 3);
    EXPECT_LT((model.forecasts - Vector::Constant(3, 0.7)).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(FitNisTest, IdentityLinearExtrapolation) {
  Vector y(3);
  y << 2, 4, 6;
  const ForecastModel model =
      FitNis(y, 1, TimeBasisConfig(BasisFamily::kIdentity, 2));
  EXPECT_NEAR(model.forecasts(0), 8.0, 1e-12);
}

TEST(FitNwisTest, HandWis) {
  Vector g(2), rho(2);
  g << 2, 6;
  rho << 1, 3;
  const ForecastModel model =
      FitNwis(g, rho, 1, TimeBasisConfig(BasisFamily::kConstant, 1));
  EXPECT_NEAR(model.forecasts(0), 5.0, 1e-14);
  EXPECT_THROW(FitNwis(g, Vector(Vector::Zero(2)), 1,
                       TimeBasisConfig(BasisFamily::kConstant, 1)),
               DegenerateWeightsError);
}

TEST(NwisForecastTest, ConstantBasisIsWis) {
  Rng rng(8);
  for (int b = 0; b < 100; ++b) {
    SoftmaxLinearPolicy behavior = EstimatorBehaviorPolicy();
    const ReplayBuffer buffer = RandomBuffer(behavior, 15, 4, rng);
    const SoftmaxLinearPolicy target = EstimatorTargetPolicy();
    const EpisodeBatch all = buffer.All();
    double num = 0.0, den = 0.0;
    for (int e = 0; e < all.num_episodes(); ++e) {
      const EpisodeBatch one = buffer.Episode(e + 1);
      const double rho = TrajectoryRatio(one, target, 10.0);
      double g = 0.0, discount = 1.0;
      for (double r : one.rewards()) {
        g += discount * r;
        discount *= 0.95;
      }
      num += rho * g;
      den += rho;
    }
    const Vector forecast =
        NwisForecast(all, target, 0.95, 10.0,
                     TimeBasisConfig(BasisFamily::kConstant, 1), 2);
    EXPECT_NEAR(forecast(0), num / den, 1e-12);
    EXPECT_NEAR(forecast(1), num / den, 1e-12);
  }
}

TEST(NwisForecastTest, OnPolicyMatchesNisOnReturns) {
  Rng rng(12);
  const SoftmaxLinearPolicy policy = EstimatorTargetPolicy();
  const ReplayBuffer buffer = RandomBuffer(policy, 25, 3, rng);
  const TimeBasisConfig basis(BasisFamily::kFourierCosine, 3);
  const Vector nwis =
      NwisForecast(buffer.All(), policy, 0.9, std::nullopt, basis, 3);
  const Vector nis =
      NisForecast(buffer.All(), policy, 0.9, std::nullopt, basis, 3);
  // With pi = beta every PDIS estimate is the discounted return.
  EXPECT_LT((nwis - nis).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NisForecastTest, MonteCarloMeanMatchesExactValue) {
  EstimatorSuiteOptions options;
  options.unbiased_runs = 200;
  const UnbiasednessResult r = RunUnbiasednessStudy(options);
  EXPECT_LT(std::abs(r.mean - r.true_value), 3 * r.standard_error);
}

TEST(NwisForecastTest, SmallSampleBiasShrinks) {
  EstimatorSuiteOptions options;
  options.bias_runs = 20000;
  options.bias_episodes = {2, 32};
  const std::vector<BiasPoint> points = RunNwisBiasStudy(options);
  ASSERT_EQ(points.size(), 2u);
  const double j = TwoStateMdp().ExactValue(EstimatorTargetPolicy(),
                                            options.gamma);
  EXPECT_GT(points[0].z, 3.0);
  EXPECT_LT(std::abs(points[1].mean - j), std::abs(points[0].mean - j));
}

}  // namespace
}  // namespace prognosticator
