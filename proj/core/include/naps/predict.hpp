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

#ifndef NAPS_PREDICT_HPP_
#define NAPS_PREDICT_HPP_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "naps/classifier.hpp"
#include "naps/cutoffs.hpp"
#include "naps/nuisance.hpp"
#include "naps/rejection.hpp"

namespace naps {

// A subset of {0, 1} with its audit trail.
struct PredictionSet {
  std::array<bool, 2> member{};
  std::array<double, 2> score{};      // statistic compared to the cutoff
  std::array<double, 2> cutoff{};
  std::array<bool, 2> saturated{};    // cutoff saturated; label included

  bool contains(Label y) const { return member[Index(y)]; }
  int size() const { return int{member[0]} + int{member[1]}; }
  bool empty() const { return size() == 0; }
  bool ambiguous() const { return size() == 2; }
};

// Every method maps (x, P_train(Y=1|x)) to a set. The posterior is passed
// in so that a batch computes it once for all methods.
class SetPredictor {
 public:
  virtual ~SetPredictor() = default;
  virtual std::string name() const = 0;
  virtual PredictionSet Predict(std::span<const double> x, double posterior1) const = 0;
};

std::vector<PredictionSet> PredictBatch(const SetPredictor& predictor,
                                        const Dataset& data,
                                        std::span<const double> posterior1,
                                        int threads = 1);

// Nuisance-aware prediction set: y in H(x) iff tau_y(x) > C*_y(x), with
// C*_y the data-dependent FPR cutoff at beta = alpha - gamma.
class NapsPredictor : public SetPredictor {
 public:
  // surfaces[y] is fitted on the statistic tau_y.
  NapsPredictor(const ClassifierModel& model,
                const std::array<const RejectionSurface*, 2>& surfaces,
                NuisanceSetProvider provider, double alpha, double gamma,
                std::string name = "naps");

  std::string name() const override { return name_; }
  PredictionSet Predict(std::span<const double> x, double posterior1) const override;

  const CutoffResult& cutoff(Label y) const { return cutoffs_[Index(y)]; }
  bool saturated(Label y) const { return saturated_[Index(y)]; }
  const std::string& saturation_message(Label y) const { return messages_[Index(y)]; }

 private:
  std::string name_;
  std::array<double, 2> prior_{};
  std::array<CutoffResult, 2> cutoffs_;
  std::array<bool, 2> saturated_{};
  std::array<std::string, 2> messages_;
};

// Lower empirical alpha-quantile: order statistic ceil(alpha n), at least 1.
double LowerEmpiricalQuantile(std::vector<double> values, double alpha);

// Scores s_i = P(Y = y_i | x_i); include y iff P(Y = y | x) > C*.
class StandardSetPredictor : public SetPredictor {
 public:
  StandardSetPredictor(const Dataset& calibration,
                       std::span<const double> calibration_posterior1, double alpha);

  std::string name() const override { return "standard"; }
  PredictionSet Predict(std::span<const double> x, double posterior1) const override;
  double threshold() const { return threshold_; }

 private:
  double threshold_ = 0.0;
};

// Per-class cutoffs from the scores of each class separately.
class ClassConditionalPredictor : public SetPredictor {
 public:
  ClassConditionalPredictor(const Dataset& calibration,
                            std::span<const double> calibration_posterior1,
                            double alpha);

  std::string name() const override { return "class-conditional"; }
  PredictionSet Predict(std::span<const double> x, double posterior1) const override;
  double threshold(Label y) const { return thresholds_[Index(y)]; }

 private:
  std::array<double, 2> thresholds_{};
};

// h*(x) = 1 iff P(Y = 1 | x) >= c0 / (c0 + c1) (ties go to 1).
struct BayesCosts {
  double c0 = 1.0;
  double c1 = 1.0;
};
Label BayesPointPredict(double posterior1, const BayesCosts& costs);

class BayesPointPredictor : public SetPredictor {
 public:
  explicit BayesPointPredictor(BayesCosts costs);

  std::string name() const override { return "bayes"; }
  PredictionSet Predict(std::span<const double> x, double posterior1) const override;

 private:
  BayesCosts costs_;
};

// Class-conditional sets scored with P(Y = 1 | x, nu = nu_hat(x)), nu_hat the
// posterior mean of nu. Cutoffs are calibrated on the marginal-posterior
// scores by default; kPlugInScores recalibrates on the plug-in scores.
class PlugInPredictor : public SetPredictor {
 public:
  enum class Calibration { kMarginalScores, kPlugInScores };

  PlugInPredictor(const ClassifierModel& model, const Dataset& calibration,
                  std::span<const double> calibration_posterior1, double alpha,
                  Calibration calibration_mode = Calibration::kMarginalScores,
                  int threads = 1);

  std::string name() const override { return "plug-in"; }
  PredictionSet Predict(std::span<const double> x, double posterior1) const override;
  double PlugInPosterior1(double x) const;
  double threshold(Label y) const { return thresholds_[Index(y)]; }

 private:
  ClassifierModel marginal_;
  ClassifierModel conditional_;
  std::array<double, 2> thresholds_{};
};

// Columns: x, score per label, cutoff per label, membership, flags.
void WritePredictionsCsv(std::ostream& out, const Dataset& data,
                         std::span<const PredictionSet> sets);

}  // namespace naps

#endif  // NAPS_PREDICT_HPP_
