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

#ifndef NAPS_EXPERIMENT_HPP_
#define NAPS_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "naps/classifier.hpp"
#include "naps/cutoffs.hpp"
#include "naps/genmodel.hpp"
#include "naps/metrics.hpp"
#include "naps/nuisance.hpp"
#include "naps/predict.hpp"
#include "naps/rejection.hpp"

namespace naps {

// gamma as a function of alpha: a constant, or a multiple of alpha.
struct GammaRule {
  enum class Kind { kFixed, kMultipleOfAlpha };

  Kind kind = Kind::kMultipleOfAlpha;
  double value = 0.01;

  double For(double alpha) const;
  // "0.001" (fixed) or "alpha*0.01" / "0.01*alpha" (multiple).
  static GammaRule Parse(const std::string& text);
  std::string ToString() const;

  friend bool operator==(const GammaRule&, const GammaRule&) = default;
};

inline const std::vector<std::string> kAllMethods = {
    "standard", "class-conditional", "bayes", "plug-in", "naps", "naps-oracle"};

struct ExperimentConfig {
  Scenario scenario = Scenario::kAnalyticExponential;
  double class1_probability = 0.5;
  PriorSpec train_prior = PriorSpec::Uniform(NuisanceSpace::Continuous(1.0, 10.0));
  PriorSpec target_prior = PriorSpec::Uniform(NuisanceSpace::Continuous(1.0, 10.0));
  // Multiplies the class-0 rate on target data only; 1 keeps p(x | y, nu)
  // shared between train and target.
  double target_class0_rate_multiplier = 1.0;

  std::string classifier = "analytic";  // analytic | histogram
  int histogram_bins = 50;

  std::size_t train_size = 100000;
  std::size_t calibration_size = 200000;
  std::size_t evaluation_size = 50000;

  std::vector<double> alphas = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  GammaRule gamma;
  std::vector<std::string> methods = kAllMethods;
  int nu_bins = 20;
  std::size_t grid_size = 200;

  // Gamma sweep.
  double sweep_alpha = 0.05;
  double sweep_gamma_min = 1e-4;
  double sweep_gamma_max = 1e-2;
  int sweep_points = 30;

  // Invariance check: target cells with fewer samples are skipped.
  std::size_t invariance_min_cell = 1000;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";

  void Validate() const;
  GenerativeConfig TrainModel() const;
  GenerativeConfig TargetModel() const;
  NuisanceSpace space() const { return train_prior.support; }
};

// Everything fitted once and reused for any number of predictions.
struct FittedModels {
  ClassifierModel classifier;
  std::array<RejectionSurface, 2> surfaces;  // indexed by statistic label
};

FittedModels FitModels(const ExperimentConfig& config);
Dataset CalibrationData(const ExperimentConfig& config);
Dataset EvaluationData(const ExperimentConfig& config);

struct MethodResult {
  std::string method;
  double alpha = 0.0;
  double gamma = 0.0;
  std::array<double, 2> cutoff{};
  std::array<bool, 2> saturated{};
  MetricsTable metrics;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MethodResult> results;
  std::vector<std::string> warnings;
};

// When `fitted` is given, no classifier or surface is refitted.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const FittedModels* fitted = nullptr);

struct GammaSweepRow {
  double gamma = 0.0;
  double x0_star = 0.0;
  double x0_arg_nu = 0.0;
  Interval region;
  double power = 0.0;           // closed form P(0 not in H | Y = 1)
  double power_mc = 0.0;        // Monte Carlo estimate of the same
  double power_mc_se = 0.0;
};

struct GammaSweepReport {
  double alpha = 0.0;
  std::vector<GammaSweepRow> rows;
  std::vector<double> skipped;  // gamma >= alpha
  double minimizing_gamma = 0.0;
  std::vector<std::string> warnings;
};

std::vector<double> LogGrid(double lo, double hi, int points);
GammaSweepReport GammaSweep(const ExperimentConfig& config, double alpha,
                            const std::vector<double>& gamma_grid);

struct InvarianceCell {
  Label y = Label::kZero;
  std::size_t bin = 0;
  double nu_lo = 0.0;
  double nu_hi = 0.0;
  std::size_t target_count = 0;
  double sup_distance = 0.0;
  bool skipped = false;
};

struct InvarianceReport {
  std::vector<InvarianceCell> cells;
  double max_sup_distance = 0.0;
  std::vector<std::string> warnings;
};

// Train-fitted W for tau_0 against target rejection frequencies per cell.
InvarianceReport InvarianceCheck(const ExperimentConfig& config);

struct DiagnoseReport {
  PitReport nuisance_aware;
  PitReport nuisance_ignoring;  // one-bin surface
};

DiagnoseReport Diagnose(const ExperimentConfig& config);

}  // namespace naps

#endif  // NAPS_EXPERIMENT_HPP_
