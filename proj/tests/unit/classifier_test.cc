/*
 * Copyright 2026 The NAPS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "naps/classifier.hpp"
#include "naps/error.hpp"
#include "naps/genmodel.hpp"
#include "support/oracles.hpp"

namespace naps {
namespace {

const ClassifierModel& Analytic() {
  static const ClassifierModel m = ClassifierModel::AnalyticMarginal(AnalyticConfig());
  return m;
}

TEST(AnalyticPosterior, MatchesQuadratureOracle) {
  for (int i = 0; i <= 20; ++i) {
    const double x = i / 20.0;
    EXPECT_NEAR(Analytic().Posterior1(x), oracle::Posterior1Uniform(x), 1e-9) << x;
  }
}

TEST(AnalyticPosterior, UnbalancedPriorAndShiftedTrainPrior) {
  const auto m = ClassifierModel::AnalyticMarginal(AnalyticConfig(0.2));
  for (double x : {0.05, 0.5, 0.95}) {
    EXPECT_NEAR(m.Posterior1(x), oracle::Posterior1Uniform(x, 0.2), 1e-9);
  }
  const auto narrow = ClassifierModel::AnalyticMarginal(AnalyticShiftedConfig(4.0, 0.1));
  // Concentrated prior: posterior close to the nu = 4 conditional one.
  const double x = 0.6;
  const double p4 = oracle::F1(x) / (oracle::F1(x) + oracle::F0(x, 4.0));
  EXPECT_NEAR(narrow.Posterior1(x), p4, 2e-3);
}

TEST(AnalyticPosterior, IncreasingInX) {
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double p = Analytic().Posterior1(i / 100.0);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(ConditionalPosterior, ClosedForm) {
  for (double nu : {1.0, 5.0, 10.0}) {
    const double x = 0.3;
    const double want = oracle::F1(x) / (oracle::F1(x) + oracle::F0(x, nu));
    EXPECT_NEAR(Analytic().Posterior1GivenNu(x, nu), want, 1e-14);
  }
}

TEST(BayesFactor, OddsRatioAgainstPrior) {
  const auto bf = BayesFactorFromPosterior(0.8, 0.5);
  EXPECT_NEAR(bf.value, 4.0, 1e-14);
  EXPECT_FALSE(bf.clipped);
  EXPECT_NEAR(BayesFactorFromPosterior(0.5, 0.2).value, 4.0, 1e-14);
}

TEST(BayesFactor, ClippedAtBothEnds) {
  const auto lo = BayesFactorFromPosterior(0.0, 0.5);
  EXPECT_TRUE(lo.clipped);
  EXPECT_NEAR(lo.value, 1e-12 / (1.0 - 1e-12), 1e-24);
  const auto hi = BayesFactorFromPosterior(1.0, 0.5);
  EXPECT_TRUE(hi.clipped);
  EXPECT_TRUE(std::isfinite(hi.value));
  EXPECT_TRUE(BayesFactorFromPosterior(std::numeric_limits<double>::quiet_NaN(), 0.5).clipped);
}

TEST(BayesFactor, LabelsAreReciprocalUnderBalancedPrior) {
  for (double x : {0.1, 0.4, 0.9}) {
    const double t0 = ComputeBayesFactor(Analytic(), Label::kZero, x).value;
    const double t1 = ComputeBayesFactor(Analytic(), Label::kOne, x).value;
    EXPECT_NEAR(t0 * t1, 1.0, 1e-12);
  }
}

TEST(StatisticBatch, AgreesWithPointwise) {
  const Dataset d = SampleDataset(AnalyticConfig(), 300, 2);
  const auto batch = ComputeStatistic(Analytic(), Label::kOne, d, 2);
  ASSERT_EQ(batch.values.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(batch.values[i], ComputeBayesFactor(Analytic(), Label::kOne, d.x1(i)).value);
  }
  EXPECT_EQ(batch.clipped, 0u);
}

TEST(StatisticCutoffToX, InvertsStatistic) {
  for (double x : {0.2, 0.5, 0.91}) {
    for (Label y : kLabels) {
      const double c = ComputeBayesFactor(Analytic(), y, x).value;
      EXPECT_NEAR(StatisticCutoffToX(Analytic(), y, c), x, 1e-9);
    }
  }
  EXPECT_EQ(StatisticCutoffToX(Analytic(), Label::kZero,
                               std::numeric_limits<double>::infinity()),
            0.0);
}

TEST(Histogram, SmoothedFrequenciesAndLookup) {
  Dataset d;
  for (double x : {0.1, 0.2, 0.3}) {
    d.y.push_back(Label::kZero);
    d.nu.push_back(1.0);
    d.x.push_back(x);
  }
  for (double x : {0.6, 0.7, 0.8, 0.4}) {
    d.y.push_back(Label::kOne);
    d.nu.push_back(1.0);
    d.x.push_back(x);
  }
  const auto m = FitHistogramClassifier(d, 2);
  ASSERT_EQ(m.kind(), ClassifierModel::Kind::kHistogram);
  // bin [0,0.5): 3 zeros and one 1 -> (1+1)/(4+2); bin [0.5,1]: 3 ones -> 4/5
  EXPECT_NEAR(m.Posterior1(0.25), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.Posterior1(0.5), 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(m.Posterior1(1.0), 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(m.ClassPrior(Label::kOne), 5.0 / 9.0, 1e-15);  // add-one smoothed
  EXPECT_THROW(FitHistogramClassifier(Dataset{}, 4), ConfigError);
  EXPECT_THROW(PosteriorMeanNu(m, 0.3), ConfigError);
}

TEST(Histogram, ApproachesAnalyticPosterior) {
  const auto d = SampleDataset(AnalyticConfig(), 200000, 17, StreamId(Stream::kTrain));
  const auto m = FitHistogramClassifier(d, 20);
  for (double x : {0.125, 0.475, 0.825}) {
    EXPECT_NEAR(m.Posterior1(x), Analytic().Posterior1(x), 0.03) << x;
  }
}

TEST(PosteriorMeanNu, MatchesQuadrature) {
  for (double x : {0.05, 0.5, 0.95}) {
    const double num = oracle::Simpson(
        [x](double nu) { return nu * oracle::F0(x, nu); }, 1.0, 10.0);
    const double f0 = oracle::Simpson([x](double nu) { return oracle::F0(x, nu); }, 1.0, 10.0);
    const double f1 = oracle::F1(x) * 9.0;  // class-1 mass spread over the same prior
    const double want = (num + 5.5 * f1) / (f0 + f1);
    EXPECT_NEAR(PosteriorMeanNu(Analytic(), x), want, 1e-6) << x;
  }
}

TEST(Classifier, NuConditionalNeedsNuisance) {
  const auto m = ClassifierModel::NuConditional(AnalyticConfig());
  EXPECT_THROW(m.Posterior1(0.5), ConfigError);
  EXPECT_GT(m.Posterior1GivenNu(0.5, 3.0), 0.0);
}

}  // namespace
}  // namespace naps
