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

#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "naps/classifier.hpp"
#include "naps/error.hpp"
#include "naps/nuisance.hpp"
#include "naps/predict.hpp"
#include "support/exact_surface.hpp"

namespace naps {
namespace {

const NuisanceSpace kSpace = NuisanceSpace::Continuous(1, 10);

struct ExactSurfaces {
  RejectionSurface tau0 =
      oracle::ExactSurface(Label::kZero, NuBinning::EqualWidth(1, 10, 450), 4000);
  RejectionSurface tau1 =
      oracle::ExactSurface(Label::kOne, NuBinning::EqualWidth(1, 10, 450), 4000);
};
const ExactSurfaces& Surfaces() {
  static const ExactSurfaces s;
  return s;
}

NapsPredictor Naps(double alpha, double gamma = 0.0,
                   NuisanceSetProvider p = NuisanceSetProvider::FullSpace(kSpace)) {
  return NapsPredictor(oracle::AnalyticModel(), {&Surfaces().tau0, &Surfaces().tau1},
                       std::move(p), alpha, gamma);
}

PredictionSet At(const SetPredictor& pred, double x) {
  return pred.Predict(std::span<const double>(&x, 1),
                      oracle::AnalyticModel().Posterior1(x));
}

TEST(Naps, SetsAtReferencePoints) {
  const auto naps = Naps(0.05);
  const auto high = At(naps, 0.95);
  EXPECT_FALSE(high.contains(Label::kZero));
  EXPECT_TRUE(high.contains(Label::kOne));
  EXPECT_TRUE(At(naps, 0.5).ambiguous());
  const auto low = At(naps, 0.01);
  EXPECT_TRUE(low.contains(Label::kZero));
  EXPECT_FALSE(low.contains(Label::kOne));
  EXPECT_FALSE(naps.saturated(Label::kZero));
}

TEST(Naps, RequiresMatchingSurfaces) {
  EXPECT_THROW(NapsPredictor(oracle::AnalyticModel(), {&Surfaces().tau1, &Surfaces().tau1},
                             NuisanceSetProvider::FullSpace(kSpace), 0.05, 0.0),
               ConfigError);
  EXPECT_THROW(Naps(0.05, 0.06), ConfigError);
}

TEST(Naps, OracleSetShrinksExclusionRegionForClassZero) {
  const auto wide = Naps(0.05, 0.0025);
  const auto narrow = Naps(0.05, 0.0025,
                           NuisanceSetProvider::OracleQuantile(
                               PriorSpec::TruncatedGaussian(4.0, 0.1, kSpace), 0.0025));
  // x = 0.8 keeps label 0 under the uniform cutoff, not under the restricted one.
  EXPECT_TRUE(At(wide, 0.8).contains(Label::kZero));
  EXPECT_FALSE(At(narrow, 0.8).contains(Label::kZero));
  EXPECT_GT(narrow.cutoff(Label::kZero).cutoff, wide.cutoff(Label::kZero).cutoff);
}

// Property: sets are nested, growing as alpha shrinks.
TEST(Naps, NestedInAlpha) {
  const std::vector<double> alphas{0.3, 0.2, 0.1, 0.05, 0.01};
  std::vector<NapsPredictor> preds;
  for (double a : alphas) preds.push_back(Naps(a));
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    for (std::size_t k = 1; k < preds.size(); ++k) {
      const auto larger_alpha = At(preds[k - 1], x);
      const auto smaller_alpha = At(preds[k], x);
      for (Label y : kLabels) {
        if (larger_alpha.contains(y)) ASSERT_TRUE(smaller_alpha.contains(y)) << x;
      }
    }
  }
}

TEST(LowerEmpiricalQuantile, CeilOrderStatistic) {
  const std::vector<double> v{5, 1, 4, 2, 3};
  EXPECT_EQ(LowerEmpiricalQuantile(v, 0.3), 2.0);
  EXPECT_EQ(LowerEmpiricalQuantile(v, 0.2), 1.0);
  EXPECT_EQ(LowerEmpiricalQuantile(v, 0.01), 1.0);
  EXPECT_EQ(LowerEmpiricalQuantile(v, 0.81), 5.0);
  EXPECT_THROW(LowerEmpiricalQuantile({}, 0.1), ConfigError);
  EXPECT_THROW(LowerEmpiricalQuantile(v, 1.0), ConfigError);
}

Dataset HandCalibration() {
  Dataset d;
  d.y = {Label::kZero, Label::kZero, Label::kOne, Label::kOne};
  d.nu = {1, 2, 3, 4};
  d.x = {0.1, 0.2, 0.3, 0.4};
  return d;
}

TEST(StandardSet, ThresholdFromTrueLabelScores) {
  const auto d = HandCalibration();
  const std::vector<double> p1{0.2, 0.6, 0.7, 0.9};
  // scores 0.8, 0.4, 0.7, 0.9 -> ceil(0.5 * 4) = 2nd smallest = 0.7
  const StandardSetPredictor s(d, p1, 0.5);
  EXPECT_DOUBLE_EQ(s.threshold(), 0.7);
  const double x = 0.5;
  const auto set = s.Predict(std::span<const double>(&x, 1), 0.75);
  EXPECT_TRUE(set.contains(Label::kOne));
  EXPECT_FALSE(set.contains(Label::kZero));
  EXPECT_TRUE(s.Predict(std::span<const double>(&x, 1), 0.5).empty());
}

TEST(ClassConditional, PerClassThresholds) {
  const auto d = HandCalibration();
  const std::vector<double> p1{0.2, 0.6, 0.7, 0.9};
  const ClassConditionalPredictor c(d, p1, 0.5);
  EXPECT_DOUBLE_EQ(c.threshold(Label::kZero), 0.4);
  EXPECT_DOUBLE_EQ(c.threshold(Label::kOne), 0.7);
}

TEST(ClassConditional, NestedInAlpha) {
  const auto d = SampleDataset(AnalyticConfig(), 2000, 4);
  const auto p1 = Posterior1Batch(oracle::AnalyticModel(), d);
  const ClassConditionalPredictor loose(d, p1, 0.05);
  const ClassConditionalPredictor tight(d, p1, 0.3);
  for (int i = 0; i <= 50; ++i) {
    const double x = i / 50.0;
    const auto a = At(loose, x);
    const auto b = At(tight, x);
    for (Label y : kLabels) {
      if (b.contains(y)) EXPECT_TRUE(a.contains(y));
    }
  }
}

TEST(Bayes, CostThresholdAndTies) {
  EXPECT_EQ(BayesPointPredict(0.5, {}), Label::kOne);
  EXPECT_EQ(BayesPointPredict(0.4999, {}), Label::kZero);
  EXPECT_EQ(BayesPointPredict(0.74, {3.0, 1.0}), Label::kZero);
  EXPECT_EQ(BayesPointPredict(0.75, {3.0, 1.0}), Label::kOne);
  EXPECT_THROW(BayesPointPredict(0.5, {0.0, 1.0}), ConfigError);
  const BayesPointPredictor b({});
  const double x = 0.1;
  EXPECT_EQ(b.Predict(std::span<const double>(&x, 1), 0.3).size(), 1);
}

TEST(PlugIn, PointMassPriorReducesToClassConditional) {
  GenerativeConfig c = AnalyticConfig();
  c.prior_class0 = PriorSpec::PointMass(3.0, kSpace);
  c.prior_class1 = PriorSpec::PointMass(3.0, kSpace);
  const auto model = ClassifierModel::AnalyticMarginal(c);
  const auto cal = SampleDataset(c, 3000, 6);
  const auto p1 = Posterior1Batch(model, cal);
  const PlugInPredictor plug(model, cal, p1, 0.1, PlugInPredictor::Calibration::kPlugInScores);
  const ClassConditionalPredictor cc(cal, p1, 0.1);
  for (Label y : kLabels) EXPECT_NEAR(plug.threshold(y), cc.threshold(y), 1e-12);
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    EXPECT_NEAR(plug.PlugInPosterior1(x), model.Posterior1(x), 1e-12);
  }
}

TEST(PlugIn, RejectsHistogramModel) {
  const auto d = SampleDataset(AnalyticConfig(), 500, 1);
  const auto h = FitHistogramClassifier(d, 5);
  const auto p1 = Posterior1Batch(h, d);
  EXPECT_THROW(PlugInPredictor(h, d, p1, 0.1), ConfigError);
}

TEST(PredictionsCsv, HeaderAndFlags) {
  const auto naps = Naps(0.05);
  Dataset d;
  d.y = {Label::kOne};
  d.nu = {2.0};
  d.x = {0.95};
  const auto p1 = Posterior1Batch(oracle::AnalyticModel(), d);
  const auto sets = PredictBatch(naps, d, p1);
  std::ostringstream out;
  WritePredictionsCsv(out, d, sets);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("x,score0,score1,cutoff0,cutoff1,member0,member1,flags\n", 0), 0u);
  EXPECT_NE(text.find(",0,1,"), std::string::npos);
}

}  // namespace
}  // namespace naps
