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

#ifndef NAPS_CLASSIFIER_HPP_
#define NAPS_CLASSIFIER_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "naps/genmodel.hpp"

namespace naps {

// Posterior clipping used by the Bayes-factor statistic.
inline constexpr double kPosteriorClip = 1e-12;
// Absolute tolerance of every nuisance-marginalizing integral.
inline constexpr double kQuadratureTolerance = 1e-9;

struct HistogramModel {
  std::vector<double> edges;        // n_bins + 1 sorted edges
  std::vector<double> probability;  // smoothed P(Y = 1 | bin)
  double class1_prior = 0.5;        // training class-1 frequency

  friend bool operator==(const HistogramModel&, const HistogramModel&) = default;
};

// A probabilistic classifier P_train(Y = 1 | x).
//
//  * kAnalyticMarginal: exact posterior of the training simulator with the
//    nuisance parameter integrated out against its training prior.
//  * kNuConditional: exact posterior with the nuisance held fixed; only
//    Posterior1GivenNu() is meaningful.
//  * kHistogram: per-bin class-1 frequencies with add-one smoothing.
//
// Models are immutable and all evaluations are thread-safe.
class ClassifierModel {
 public:
  enum class Kind { kAnalyticMarginal, kHistogram, kNuConditional };

  static ClassifierModel AnalyticMarginal(GenerativeConfig train);
  static ClassifierModel NuConditional(GenerativeConfig train);
  static ClassifierModel Histogram(HistogramModel histogram);

  Kind kind() const { return kind_; }
  const GenerativeConfig& train_config() const { return train_; }
  const HistogramModel& histogram() const { return histogram_; }

  // P_train(Y = y).
  double ClassPrior(Label y) const;

  double Posterior1(std::span<const double> x) const;
  double Posterior1(double x) const { return Posterior1(std::span<const double>(&x, 1)); }
  double Posterior1GivenNu(std::span<const double> x, double nu) const;
  double Posterior1GivenNu(double x, double nu) const {
    return Posterior1GivenNu(std::span<const double>(&x, 1), nu);
  }

 private:
  Kind kind_ = Kind::kAnalyticMarginal;
  GenerativeConfig train_;
  HistogramModel histogram_;
};

struct BayesFactor {
  double value = 1.0;
  bool clipped = false;
};

// tau_y = [P(Y=y|x) P(Y!=y)] / [P(Y!=y|x) P(Y=y)], with the posterior clipped
// into [kPosteriorClip, 1 - kPosteriorClip].
BayesFactor BayesFactorFromPosterior(double posterior_y, double prior_y);
BayesFactor ComputeBayesFactor(const ClassifierModel& model, Label y,
                               std::span<const double> x);
inline BayesFactor ComputeBayesFactor(const ClassifierModel& model, Label y,
                                      double x) {
  return ComputeBayesFactor(model, y, std::span<const double>(&x, 1));
}

// Bayes-factor statistic evaluated on every sample of a dataset.
struct StatisticBatch {
  Label label = Label::kZero;
  std::vector<double> values;
  std::size_t clipped = 0;
};

std::vector<double> Posterior1Batch(const ClassifierModel& model,
                                    const Dataset& data, int threads = 1);
StatisticBatch StatisticFromPosteriors(const ClassifierModel& model, Label y,
                                       std::span<const double> posterior1);
StatisticBatch ComputeStatistic(const ClassifierModel& model, Label y,
                                const Dataset& data, int threads = 1);

// Histogram classifier on the scalar observation of the analytic scenario,
// with n_bins equal-width bins on [0, 1].
ClassifierModel FitHistogramClassifier(const Dataset& data, int n_bins);

// Posterior mean of nu given x (labels marginalized), analytic scenario.
double PosteriorMeanNu(const ClassifierModel& model, double x);

// x-scale threshold equivalent to the statistic cutoff C: for y = 0,
// tau_0(x) <= C iff x >= result; for y = 1, tau_1(x) <= C iff x <= result.
// Requires a scalar observation and a statistic monotone in x.
double StatisticCutoffToX(const ClassifierModel& model, Label y, double cutoff);

}  // namespace naps

#endif  // NAPS_CLASSIFIER_HPP_
