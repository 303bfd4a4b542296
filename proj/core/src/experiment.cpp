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

#include "naps/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <tuple>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {
namespace {

bool Wants(const ExperimentConfig& c, const std::string& method) {
  return std::find(c.methods.begin(), c.methods.end(), method) != c.methods.end();
}

bool NeedsSurfaces(const ExperimentConfig& c) {
  return Wants(c, "naps") || Wants(c, "naps-oracle");
}

template <typename Fn>
auto Stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (...) {
    RethrowWithStage(name);
  }
}

}  // namespace

// GammaRule -------------------------------------------------------------------

double GammaRule::For(double alpha) const {
  return kind == Kind::kFixed ? value : value * alpha;
}

GammaRule GammaRule::Parse(const std::string& text) {
  GammaRule rule;
  std::string t;
  for (char c : text) {
    if (c != ' ') t += c;
  }
  const auto star = t.find('*');
  if (star == std::string::npos) {
    rule.kind = Kind::kFixed;
    rule.value = ParseDouble(t);
  } else {
    const std::string a = t.substr(0, star);
    const std::string b = t.substr(star + 1);
    rule.kind = Kind::kMultipleOfAlpha;
    if (a == "alpha") {
      rule.value = ParseDouble(b);
    } else if (b == "alpha") {
      rule.value = ParseDouble(a);
    } else {
      throw ConfigError("gamma rule '" + text +
                        "' is neither a number nor alpha*<factor>");
    }
  }
  if (!(rule.value >= 0.0)) throw ConfigError("gamma rule must be nonnegative");
  return rule;
}

std::string GammaRule::ToString() const {
  return kind == Kind::kFixed ? FormatShort(value) : "alpha*" + FormatShort(value);
}

// ExperimentConfig ------------------------------------------------------------

void ExperimentConfig::Validate() const {
  train_prior.Validate();
  target_prior.Validate();
  if (!(train_prior.support == target_prior.support)) {
    throw ConfigError("train and target priors must share the nuisance space");
  }
  if (scenario == Scenario::kAnalyticExponential && !space().is_continuous()) {
    throw ConfigError("analytic scenario needs a continuous nuisance space");
  }
  if (scenario == Scenario::kDiscreteToy && space().is_continuous()) {
    throw ConfigError("discrete toy scenario needs a discrete nuisance space");
  }
  if (!(class1_probability > 0.0 && class1_probability < 1.0)) {
    throw ConfigError("class-1 probability must lie in (0, 1)");
  }
  if (!(target_class0_rate_multiplier > 0.0)) {
    throw ConfigError("target class-0 rate multiplier must be positive");
  }
  if (classifier != "analytic" && classifier != "histogram") {
    throw ConfigError("classifier must be 'analytic' or 'histogram', got '" +
                      classifier + "'");
  }
  if (classifier == "histogram" && scenario != Scenario::kAnalyticExponential) {
    throw ConfigError("histogram classifier supports the analytic scenario only");
  }
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be at least 1");
  if (train_size < 1 || calibration_size < 1 || evaluation_size < 1) {
    throw ConfigError("sample sizes must be at least 1");
  }
  if (alphas.empty()) throw ConfigError("alpha grid is empty");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError("alpha = " + FormatShort(a) + " outside (0, 1)");
    }
    const double g = gamma.For(a);
    if (!(g >= 0.0 && g <= a)) {
      throw ConfigError("gamma rule " + gamma.ToString() + " gives gamma = " +
                        FormatShort(g) + " outside [0, alpha] at alpha = " +
                        FormatShort(a));
    }
  }
  if (methods.empty()) throw ConfigError("method list is empty");
  for (const std::string& m : methods) {
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  if (scenario != Scenario::kAnalyticExponential &&
      (Wants(*this, "plug-in") || Wants(*this, "naps-oracle"))) {
    throw ConfigError("plug-in and naps-oracle need the analytic scenario");
  }
  if (nu_bins < 1) throw ConfigError("nu_bins must be at least 1");
  if (grid_size < 2) throw ConfigError("grid_size K must be at least 2");
  if (!(sweep_alpha > 0.0 && sweep_alpha < 1.0)) {
    throw ConfigError("sweep_alpha outside (0, 1)");
  }
  if (!(sweep_gamma_min > 0.0 && sweep_gamma_max >= sweep_gamma_min) ||
      sweep_points < 1) {
    throw ConfigError("gamma sweep grid needs 0 < min <= max and points >= 1");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

GenerativeConfig ExperimentConfig::TrainModel() const {
  GenerativeConfig g;
  if (scenario == Scenario::kDiscreteToy) g = DiscreteToyConfig(train_prior.weights);
  g.scenario = scenario;
  g.class1_probability = class1_probability;
  g.prior_class0 = train_prior;
  g.prior_class1 = train_prior;
  g.Validate();
  return g;
}

GenerativeConfig ExperimentConfig::TargetModel() const {
  GenerativeConfig g = TrainModel();
  g.prior_class0 = target_prior;
  g.prior_class1 = target_prior;
  g.class0_rate_multiplier = target_class0_rate_multiplier;
  g.Validate();
  return g;
}

// Fitting ---------------------------------------------------------------------

Dataset CalibrationData(const ExperimentConfig& config) {
  return SampleDataset(config.TrainModel(), config.calibration_size, config.seed,
                       StreamId(Stream::kCalibration), config.threads);
}

Dataset EvaluationData(const ExperimentConfig& config) {
  return SampleDataset(config.TargetModel(), config.evaluation_size, config.seed,
                       StreamId(Stream::kEvaluation), config.threads);
}

namespace {

ClassifierModel FitClassifier(const ExperimentConfig& config) {
  if (config.classifier == "histogram") {
    const Dataset train = SampleDataset(config.TrainModel(), config.train_size,
                                        config.seed, StreamId(Stream::kTrain),
                                        config.threads);
    return FitHistogramClassifier(train, config.histogram_bins);
  }
  return ClassifierModel::AnalyticMarginal(config.TrainModel());
}

RejectionSurface FitSurface(const ExperimentConfig& config,
                            const ClassifierModel& model, const Dataset& calibration,
                            std::span<const double> posterior1, Label statistic,
                            const NuBinning& binning) {
  const StatisticBatch stat = StatisticFromPosteriors(model, statistic, posterior1);
  const CutoffGrid grid = SampleCutoffGrid(stat.values, config.grid_size, config.seed);
  return FitRejectionSurface(calibration, stat.values, grid, binning, statistic,
                             kBothLabels, config.seed);
}

}  // namespace

FittedModels FitModels(const ExperimentConfig& config) {
  config.Validate();
  FittedModels fitted;
  fitted.classifier = Stage("classifier fit", [&] { return FitClassifier(config); });
  const Dataset calibration =
      Stage("calibration sampling", [&] { return CalibrationData(config); });
  const std::vector<double> posterior = Stage("calibration posterior", [&] {
    return Posterior1Batch(fitted.classifier, calibration, config.threads);
  });
  const NuBinning binning = NuBinning::Default(config.space(), config.nu_bins);
  for (Label y : kLabels) {
    fitted.surfaces[Index(y)] =
        Stage("rejection surface fit (tau_" + std::to_string(Index(y)) + ")", [&] {
          return FitSurface(config, fitted.classifier, calibration, posterior, y,
                            binning);
        });
  }
  return fitted;
}

// Experiment ------------------------------------------------------------------

ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const FittedModels* fitted) {
  config.Validate();
  ExperimentReport report;
  report.config = config;

  FittedModels local;
  if (fitted == nullptr) {
    if (NeedsSurfaces(config)) {
      local = FitModels(config);
    } else {
      local.classifier = Stage("classifier fit", [&] { return FitClassifier(config); });
    }
    fitted = &local;
  }
  const ClassifierModel& model = fitted->classifier;
  if (NeedsSurfaces(config)) {
    for (Label y : kLabels) {
      if (fitted->surfaces[Index(y)].grid().size() == 0) {
        throw ConfigError("NAPS requested but no rejection surface is available");
      }
    }
  }

  const Dataset calibration =
      Stage("calibration sampling", [&] { return CalibrationData(config); });
  const std::vector<double> calibration_posterior = Stage(
      "calibration posterior",
      [&] { return Posterior1Batch(model, calibration, config.threads); });
  const Dataset evaluation =
      Stage("evaluation sampling", [&] { return EvaluationData(config); });
  const std::vector<double> evaluation_posterior = Stage(
      "evaluation posterior",
      [&] { return Posterior1Batch(model, evaluation, config.threads); });
  const NuBinning binning = NeedsSurfaces(config)
                                ? fitted->surfaces[0].binning()
                                : NuBinning::Default(config.space(), config.nu_bins);
  const std::array<const RejectionSurface*, 2> surfaces = {&fitted->surfaces[0],
                                                           &fitted->surfaces[1]};

  for (const std::string& method : config.methods) {
    for (double alpha : config.alphas) {
      MethodResult r;
      r.method = method;
      r.alpha = alpha;
      std::unique_ptr<SetPredictor> predictor;
      Stage("method " + method + " at alpha=" + FormatShort(alpha), [&] {
        if (method == "standard") {
          predictor = std::make_unique<StandardSetPredictor>(
              calibration, calibration_posterior, alpha);
        } else if (method == "class-conditional") {
          predictor = std::make_unique<ClassConditionalPredictor>(
              calibration, calibration_posterior, alpha);
        } else if (method == "bayes") {
          predictor = std::make_unique<BayesPointPredictor>(BayesCosts{});
        } else if (method == "plug-in") {
          predictor = std::make_unique<PlugInPredictor>(
              model, calibration, calibration_posterior, alpha,
              PlugInPredictor::Calibration::kMarginalScores, config.threads);
        } else if (method == "naps") {
          predictor = std::make_unique<NapsPredictor>(
              model, surfaces, NuisanceSetProvider::FullSpace(config.space()),
              alpha, 0.0, method);
        } else {
          r.gamma = config.gamma.For(alpha);
          predictor = std::make_unique<NapsPredictor>(
              model, surfaces,
              NuisanceSetProvider::OracleQuantile(config.target_prior, r.gamma),
              alpha, r.gamma, method);
        }
        const auto sets =
            PredictBatch(*predictor, evaluation, evaluation_posterior, config.threads);
        r.metrics = ComputeMetrics(evaluation, sets, binning);
        if (auto* naps = dynamic_cast<NapsPredictor*>(predictor.get())) {
          for (Label y : kLabels) {
            r.cutoff[Index(y)] = naps->cutoff(y).cutoff;
            r.saturated[Index(y)] = naps->saturated(y);
            if (naps->saturated(y)) {
              report.warnings.push_back(method + " alpha=" + FormatShort(alpha) +
                                        ": " + naps->saturation_message(y));
            }
          }
        } else if (!sets.empty()) {
          r.cutoff = sets.front().cutoff;
        }
        return 0;
      });
      if (r.metrics.empty.hits > 0 && (method == "naps" || method == "naps-oracle")) {
        report.warnings.push_back(method + " alpha=" + FormatShort(alpha) + ": " +
                                  std::to_string(r.metrics.empty.hits) +
                                  " empty prediction sets");
      }
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

// Gamma sweep -----------------------------------------------------------------

std::vector<double> LogGrid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi >= lo) || points < 1) {
    throw ConfigError("log grid needs 0 < lo <= hi and at least one point");
  }
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) {
    g[i] = i == 0 ? lo : i == points - 1 ? hi : std::exp(a + (b - a) * i / (points - 1));
  }
  return g;
}

GammaSweepReport GammaSweep(const ExperimentConfig& config, double alpha,
                            const std::vector<double>& gamma_grid) {
  config.Validate();
  if (config.scenario != Scenario::kAnalyticExponential) {
    throw ConfigError("gamma sweep needs the analytic scenario");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("sweep alpha outside (0, 1)");
  GammaSweepReport report;
  report.alpha = alpha;
  // Class-1 draws for the Monte Carlo power estimate, shared by every gamma.
  const std::size_t n = config.evaluation_size;
  std::vector<double> x1(n);
  ParallelFor(n, config.threads, [&](std::size_t i) {
    SampleRng rng(config.seed, StreamId(Stream::kGammaSweep), i);
    x1[i] = analytic::DrawClass1(rng.Uniform());
  });
  double best = std::numeric_limits<double>::infinity();
  for (double gamma : gamma_grid) {
    if (!(gamma >= 0.0) || gamma >= alpha) {
      report.skipped.push_back(gamma);
      report.warnings.push_back("gamma = " + FormatShort(gamma) +
                                " skipped: not below alpha = " + FormatShort(alpha));
      continue;
    }
    GammaSweepRow row;
    row.gamma = gamma;
    const NuisanceRegion region = Stage("oracle set at gamma=" + FormatShort(gamma), [&] {
      return NuisanceSetProvider::OracleQuantile(config.target_prior, gamma)
          .SetFor(std::span<const double>(), Label::kZero);
    });
    row.region = region.intervals.front();
    const analytic::OracleCutoffs oc = analytic::OracleCutoffsFor(alpha, gamma, region);
    row.x0_star = oc.x0_star;
    row.x0_arg_nu = oc.x0_arg_nu;
    row.power = 1.0 - analytic::CdfClass1(oc.x0_star);
    const auto hits = static_cast<std::size_t>(std::count_if(
        x1.begin(), x1.end(), [&](double x) { return x > oc.x0_star; }));
    const Rate r = MakeRate(hits, n);
    row.power_mc = r.value;
    row.power_mc_se = r.standard_error;
    if (row.x0_star < best) {
      best = row.x0_star;
      report.minimizing_gamma = gamma;
    }
    report.rows.push_back(row);
  }
  return report;
}

// Invariance ------------------------------------------------------------------

InvarianceReport InvarianceCheck(const ExperimentConfig& config) {
  config.Validate();
  InvarianceReport report;
  const ClassifierModel model =
      Stage("classifier fit", [&] { return FitClassifier(config); });
  const Dataset calibration =
      Stage("calibration sampling", [&] { return CalibrationData(config); });
  const NuBinning binning = NuBinning::Default(config.space(), config.nu_bins);
  const RejectionSurface surface = Stage("rejection surface fit", [&] {
    const auto post = Posterior1Batch(model, calibration, config.threads);
    return FitSurface(config, model, calibration, post, Label::kZero, binning);
  });
  const Dataset target = Stage("target sampling", [&] {
    return SampleDataset(config.TargetModel(), config.evaluation_size, config.seed,
                         StreamId(Stream::kTarget), config.threads);
  });
  const StatisticBatch stat = Stage("target statistic", [&] {
    return ComputeStatistic(model, Label::kZero, target, config.threads);
  });
  const std::vector<double>& grid = surface.grid().values;
  const std::size_t k = grid.size();
  // first[y][b][j]: target samples whose first grid cutoff >= statistic is j.
  std::array<std::vector<std::vector<std::size_t>>, 2> first;
  for (auto& per_label : first) {
    per_label.assign(binning.num_bins(), std::vector<std::size_t>(k + 1, 0));
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto j = static_cast<std::size_t>(
        std::lower_bound(grid.begin(), grid.end(), stat.values[i]) - grid.begin());
    ++first[Index(target.y[i])][binning.BinOf(target.nu[i])][j];
  }
  for (Label y : kLabels) {
    for (std::size_t b = 0; b < binning.num_bins(); ++b) {
      InvarianceCell cell;
      cell.y = y;
      cell.bin = b;
      std::tie(cell.nu_lo, cell.nu_hi) = binning.Range(b);
      const auto& f = first[Index(y)][b];
      for (std::size_t c : f) cell.target_count += c;
      if (cell.target_count < config.invariance_min_cell) {
        cell.skipped = true;
        if (cell.target_count > 0) {
          report.warnings.push_back(
              "invariance cell (y=" + std::to_string(Index(y)) + ", bin " +
              std::to_string(b) + ") skipped: " + std::to_string(cell.target_count) +
              " target samples");
        }
        report.cells.push_back(cell);
        continue;
      }
      std::size_t running = 0;
      const SurfaceCell& fitted = surface.cell(y, b);
      for (std::size_t j = 0; j < k; ++j) {
        running += f[j];
        const double emp = static_cast<double>(running) /
                           static_cast<double>(cell.target_count);
        cell.sup_distance = std::max(cell.sup_distance, std::abs(emp - fitted.fitted[j]));
      }
      report.max_sup_distance = std::max(report.max_sup_distance, cell.sup_distance);
      report.cells.push_back(cell);
    }
  }
  return report;
}

// PIT -------------------------------------------------------------------------

DiagnoseReport Diagnose(const ExperimentConfig& config) {
  config.Validate();
  DiagnoseReport report;
  const ClassifierModel model =
      Stage("classifier fit", [&] { return FitClassifier(config); });
  const Dataset calibration =
      Stage("calibration sampling", [&] { return CalibrationData(config); });
  const auto post = Stage("calibration posterior", [&] {
    return Posterior1Batch(model, calibration, config.threads);
  });
  const NuisanceSpace space = config.space();
  const RejectionSurface aware = Stage("rejection surface fit", [&] {
    return FitSurface(config, model, calibration, post, Label::kZero,
                      NuBinning::Default(space, config.nu_bins));
  });
  const RejectionSurface ignoring = Stage("one-bin surface fit", [&] {
    const NuBinning one = space.is_continuous()
                              ? NuBinning::EqualWidth(space.lo, space.hi, 1)
                              : NuBinning::FromEdges({-0.5, space.num_categories() - 0.5});
    return FitSurface(config, model, calibration, post, Label::kZero, one);
  });
  const Dataset eval = Stage("diagnostic sampling", [&] {
    return SampleDataset(config.TrainModel(), config.evaluation_size, config.seed,
                         StreamId(Stream::kPit), config.threads);
  });
  const StatisticBatch stat = Stage("diagnostic statistic", [&] {
    return ComputeStatistic(model, Label::kZero, eval, config.threads);
  });
  const std::vector<ParamBin> bins = DefaultParamBins(space);
  report.nuisance_aware = PitDiagnostics(aware, eval, stat.values, bins);
  report.nuisance_ignoring = PitDiagnostics(ignoring, eval, stat.values, bins);
  return report;
}

}  // namespace naps
