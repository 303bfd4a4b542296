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

#include "naps/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {

std::vector<PredictionSet> PredictBatch(const SetPredictor& predictor,
                                        const Dataset& data,
                                        std::span<const double> posterior1,
                                        int threads) {
  if (posterior1.size() != data.size()) {
    throw ConfigError("one posterior per sample is required");
  }
  std::vector<PredictionSet> sets(data.size());
  ParallelFor(data.size(), threads, [&](std::size_t i) {
    sets[i] = predictor.Predict(data.observation(i), posterior1[i]);
  });
  return sets;
}

// NAPS ------------------------------------------------------------------------

NapsPredictor::NapsPredictor(const ClassifierModel& model,
                             const std::array<const RejectionSurface*, 2>& surfaces,
                             NuisanceSetProvider provider, double alpha,
                             double gamma, std::string name)
    : name_(std::move(name)) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("NAPS alpha = " + FormatShort(alpha) + " outside (0, 1)");
  }
  if (!(gamma >= 0.0 && gamma <= alpha)) {
    throw ConfigError("NAPS gamma = " + FormatShort(gamma) + " outside [0, alpha]");
  }
  provider.gamma = gamma;
  for (Label y : kLabels) {
    const RejectionSurface* s = surfaces[Index(y)];
    if (s == nullptr || s->statistic() != y || !s->has_label(y)) {
      throw ConfigError("NAPS needs a surface fitted on tau_" +
                        std::to_string(Index(y)) + " with label " +
                        std::to_string(Index(y)) + " cells");
    }
    prior_[Index(y)] = model.ClassPrior(y);
    CutoffRequest request;
    request.null_label = y;
    request.alpha = alpha;
    request.gamma = gamma;
    request.mode = ErrorMode::kFpr;
    request.scope = NuScope::ConfidenceSet(provider);
    // Both provider kinds return a region that does not depend on x, so the
    // cutoff is computed once here instead of per point.
    try {
      cutoffs_[Index(y)] =
          DataDependentCutoff(*s, std::span<const double>(), request);
    } catch (const SaturationError& e) {
      saturated_[Index(y)] = true;
      messages_[Index(y)] = e.what();
      cutoffs_[Index(y)].cutoff = std::numeric_limits<double>::quiet_NaN();
      cutoffs_[Index(y)].saturated = true;
    }
  }
}

PredictionSet NapsPredictor::Predict(std::span<const double> /*x*/,
                                     double posterior1) const {
  PredictionSet set;
  for (Label y : kLabels) {
    const int k = Index(y);
    const double post = y == Label::kOne ? posterior1 : 1.0 - posterior1;
    set.score[k] = BayesFactorFromPosterior(post, prior_[k]).value;
    set.cutoff[k] = cutoffs_[k].cutoff;
    set.saturated[k] = saturated_[k];
    set.member[k] = saturated_[k] || set.score[k] > cutoffs_[k].cutoff;
  }
  return set;
}

// Baselines -------------------------------------------------------------------

double LowerEmpiricalQuantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw ConfigError("empirical quantile of an empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha = " + FormatShort(alpha) + " outside (0, 1)");
  }
  const double n = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(alpha * n));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[k - 1];
}

StandardSetPredictor::StandardSetPredictor(const Dataset& calibration,
                                           std::span<const double> posterior1,
                                           double alpha) {
  if (calibration.empty()) throw ConfigError("calibration set is empty");
  if (posterior1.size() != calibration.size()) {
    throw ConfigError("one posterior per calibration sample is required");
  }
  std::vector<double> scores(calibration.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = calibration.y[i] == Label::kOne ? posterior1[i] : 1.0 - posterior1[i];
  }
  threshold_ = LowerEmpiricalQuantile(std::move(scores), alpha);
}

PredictionSet StandardSetPredictor::Predict(std::span<const double> /*x*/,
                                            double posterior1) const {
  PredictionSet set;
  set.score = {1.0 - posterior1, posterior1};
  set.cutoff = {threshold_, threshold_};
  for (int k = 0; k < 2; ++k) set.member[k] = set.score[k] > threshold_;
  return set;
}

namespace {

std::array<double, 2> ClassConditionalThresholds(const Dataset& calibration,
                                                 std::span<const double> scores1,
                                                 double alpha) {
  if (scores1.size() != calibration.size()) {
    throw ConfigError("one posterior per calibration sample is required");
  }
  std::array<std::vector<double>, 2> per_class;
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    const Label y = calibration.y[i];
    per_class[Index(y)].push_back(y == Label::kOne ? scores1[i] : 1.0 - scores1[i]);
  }
  std::array<double, 2> t{};
  for (Label y : kLabels) {
    if (per_class[Index(y)].empty()) {
      throw ConfigError("class " + std::to_string(Index(y)) +
                        " is absent from the calibration set");
    }
    t[Index(y)] = LowerEmpiricalQuantile(std::move(per_class[Index(y)]), alpha);
  }
  return t;
}

PredictionSet ThresholdSet(double posterior1, const std::array<double, 2>& t) {
  PredictionSet set;
  set.score = {1.0 - posterior1, posterior1};
  set.cutoff = t;
  for (int k = 0; k < 2; ++k) set.member[k] = set.score[k] > t[k];
  return set;
}

}  // namespace

ClassConditionalPredictor::ClassConditionalPredictor(
    const Dataset& calibration, std::span<const double> posterior1, double alpha)
    : thresholds_(ClassConditionalThresholds(calibration, posterior1, alpha)) {}

PredictionSet ClassConditionalPredictor::Predict(std::span<const double> /*x*/,
                                                 double posterior1) const {
  return ThresholdSet(posterior1, thresholds_);
}

Label BayesPointPredict(double posterior1, const BayesCosts& costs) {
  if (!(costs.c0 > 0.0 && costs.c1 > 0.0)) {
    throw ConfigError("Bayes classifier costs must be positive");
  }
  const double threshold = costs.c0 / (costs.c0 + costs.c1);
  return posterior1 >= threshold ? Label::kOne : Label::kZero;
}

BayesPointPredictor::BayesPointPredictor(BayesCosts costs) : costs_(costs) {
  BayesPointPredict(0.5, costs_);
}

PredictionSet BayesPointPredictor::Predict(std::span<const double> /*x*/,
                                           double posterior1) const {
  PredictionSet set;
  const double t = costs_.c0 / (costs_.c0 + costs_.c1);
  set.score = {1.0 - posterior1, posterior1};
  set.cutoff = {1.0 - t, t};
  set.member[Index(BayesPointPredict(posterior1, costs_))] = true;
  return set;
}

PlugInPredictor::PlugInPredictor(const ClassifierModel& model,
                                 const Dataset& calibration,
                                 std::span<const double> posterior1, double alpha,
                                 Calibration calibration_mode, int threads)
    : marginal_(model),
      conditional_(ClassifierModel::NuConditional(model.train_config())) {
  if (model.kind() != ClassifierModel::Kind::kAnalyticMarginal ||
      model.train_config().scenario != Scenario::kAnalyticExponential) {
    throw ConfigError("plug-in baseline requires the analytic classifier");
  }
  if (calibration_mode == Calibration::kMarginalScores) {
    thresholds_ = ClassConditionalThresholds(calibration, posterior1, alpha);
    return;
  }
  std::vector<double> plug(calibration.size());
  ParallelFor(calibration.size(), threads, [&](std::size_t i) {
    plug[i] = PlugInPosterior1(calibration.x1(i));
  });
  thresholds_ = ClassConditionalThresholds(calibration, plug, alpha);
}

double PlugInPredictor::PlugInPosterior1(double x) const {
  return conditional_.Posterior1GivenNu(x, PosteriorMeanNu(marginal_, x));
}

PredictionSet PlugInPredictor::Predict(std::span<const double> x,
                                       double /*posterior1*/) const {
  if (x.size() != 1) throw ConfigError("plug-in baseline needs a scalar observation");
  return ThresholdSet(PlugInPosterior1(x[0]), thresholds_);
}

// Output ----------------------------------------------------------------------

void WritePredictionsCsv(std::ostream& out, const Dataset& data,
                         std::span<const PredictionSet> sets) {
  if (sets.size() != data.size()) {
    throw ConfigError("one prediction set per sample is required");
  }
  out << "x,score0,score1,cutoff0,cutoff1,member0,member1,flags\n";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const PredictionSet& s = sets[i];
    std::string flags;
    if (s.empty()) flags += "empty";
    for (int k = 0; k < 2; ++k) {
      if (s.saturated[k]) {
        if (!flags.empty()) flags += ';';
        flags += "saturated" + std::to_string(k);
      }
    }
    out << FormatShort(data.x1(i)) << ',' << FormatShort(s.score[0]) << ','
        << FormatShort(s.score[1]) << ',' << FormatShort(s.cutoff[0]) << ','
        << FormatShort(s.cutoff[1]) << ',' << int{s.member[0]} << ','
        << int{s.member[1]} << ',' << flags << '\n';
  }
}

}  // namespace naps
