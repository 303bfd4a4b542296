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

#include "naps/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "naps/error.hpp"
#include "quadrature.hpp"

namespace naps {
namespace {

void RequireScalar(std::span<const double> x, const char* what) {
  if (x.size() != 1) {
    throw ConfigError(std::string(what) + " requires a scalar observation");
  }
}

// p(x | y = 0) with nu integrated against `prior` (analytic scenario).
double MarginalDensityClass0(const GenerativeConfig& train, double x) {
  const PriorSpec& prior = train.prior_class0;
  if (prior.kind == PriorSpec::Kind::kPointMass) {
    return analytic::DensityClass0(x, prior.point);
  }
  analytic::DensityClass0(x, analytic::kNuMin);  // domain check on x
  const auto [a, b] = prior.EffectiveSupport();
  const double e = -x;
  if (prior.kind == PriorSpec::Kind::kUniform) {
    const double density = 1.0 / (prior.support.hi - prior.support.lo);
    return density * internal::Integrate(
                         [e](double nu) {
                           return nu * std::exp(e * nu) / -std::expm1(-nu);
                         },
                         a, b, kQuadratureTolerance, "marginal class-0 density");
  }
  return internal::Integrate(
      [&prior, e](double nu) {
        return nu * std::exp(e * nu) / -std::expm1(-nu) * prior.Density(nu);
      },
      a, b, kQuadratureTolerance, "marginal class-0 density");
}

double ToyLogLikelihood(const GenerativeConfig& train, Label y,
                        std::size_t protocol, std::span<const double> x) {
  double ll = 0.0;
  for (int d = 0; d < kToyDims; ++d) {
    const double rate = train.toy_rates[Index(y)][protocol][d];
    ll += x[d] * std::log(rate) - rate - std::lgamma(x[d] + 1.0);
  }
  return ll;
}

double LogSumExp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

double ToyLogMarginal(const GenerativeConfig& train, Label y,
                      std::span<const double> x) {
  const PriorSpec& prior = train.prior(y);
  std::vector<double> terms;
  for (std::size_t p = 0; p < static_cast<std::size_t>(kToyProtocols); ++p) {
    const double w = prior.kind == PriorSpec::Kind::kPointMass
                         ? (static_cast<double>(p) == prior.point ? 1.0 : 0.0)
                         : prior.weights[p];
    if (w <= 0.0) continue;
    terms.push_back(std::log(w) + ToyLogLikelihood(train, y, p, x));
  }
  return LogSumExp(terms);
}

double Logistic(double log_odds) {
  if (log_odds >= 0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

}  // namespace

ClassifierModel ClassifierModel::AnalyticMarginal(GenerativeConfig train) {
  train.Validate();
  ClassifierModel m;
  m.kind_ = Kind::kAnalyticMarginal;
  m.train_ = std::move(train);
  return m;
}

ClassifierModel ClassifierModel::NuConditional(GenerativeConfig train) {
  train.Validate();
  ClassifierModel m;
  m.kind_ = Kind::kNuConditional;
  m.train_ = std::move(train);
  return m;
}

ClassifierModel ClassifierModel::Histogram(HistogramModel histogram) {
  const auto& h = histogram;
  if (h.edges.size() < 2 || h.probability.size() + 1 != h.edges.size()) {
    throw ConfigError("histogram model needs n_bins + 1 edges");
  }
  if (!std::is_sorted(h.edges.begin(), h.edges.end())) {
    throw ConfigError("histogram edges must be sorted");
  }
  for (double p : h.probability) {
    if (!(p > 0.0 && p < 1.0)) {
      throw ConfigError("histogram bin probabilities must lie in (0, 1)");
    }
  }
  if (!(h.class1_prior > 0.0 && h.class1_prior < 1.0)) {
    throw ConfigError("histogram class-1 prior must lie in (0, 1)");
  }
  ClassifierModel m;
  m.kind_ = Kind::kHistogram;
  m.histogram_ = std::move(histogram);
  m.train_ = AnalyticConfig(m.histogram_.class1_prior);
  return m;
}

double ClassifierModel::ClassPrior(Label y) const {
  const double p1 = kind_ == Kind::kHistogram ? histogram_.class1_prior
                                              : train_.class1_probability;
  return y == Label::kOne ? p1 : 1.0 - p1;
}

double ClassifierModel::Posterior1(std::span<const double> x) const {
  switch (kind_) {
    case Kind::kHistogram: {
      RequireScalar(x, "histogram classifier");
      const auto& edges = histogram_.edges;
      const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x[0]);
      return histogram_.probability[static_cast<std::size_t>(it - edges.begin() - 1)];
    }
    case Kind::kAnalyticMarginal: {
      const double p1 = train_.class1_probability;
      if (train_.scenario == Scenario::kDiscreteToy) {
        if (x.size() != static_cast<std::size_t>(kToyDims)) {
          throw ConfigError("discrete-toy observation must have 8 counts");
        }
        if (p1 <= 0.0) return 0.0;
        if (p1 >= 1.0) return 1.0;
        return Logistic(std::log(p1) - std::log1p(-p1) +
                        ToyLogMarginal(train_, Label::kOne, x) -
                        ToyLogMarginal(train_, Label::kZero, x));
      }
      RequireScalar(x, "analytic classifier");
      const double num = p1 * analytic::DensityClass1(x[0]);
      const double den = num + (1.0 - p1) * MarginalDensityClass0(train_, x[0]);
      return num / den;
    }
    case Kind::kNuConditional:
      throw ConfigError(
          "nu-conditional classifier needs a nuisance value; use "
          "Posterior1GivenNu");
  }
  return 0.5;
}

double ClassifierModel::Posterior1GivenNu(std::span<const double> x,
                                          double nu) const {
  if (kind_ == Kind::kHistogram) {
    throw ConfigError("histogram classifier has no nuisance-conditional posterior");
  }
  const double p1 = train_.class1_probability;
  if (train_.scenario == Scenario::kDiscreteToy) {
    if (!train_.space().Contains(nu)) {
      throw DomainError("protocol index outside the nuisance space");
    }
    const auto p = static_cast<std::size_t>(nu);
    return Logistic(std::log(p1) - std::log1p(-p1) +
                    ToyLogLikelihood(train_, Label::kOne, p, x) -
                    ToyLogLikelihood(train_, Label::kZero, p, x));
  }
  RequireScalar(x, "analytic classifier");
  const double num = p1 * analytic::DensityClass1(x[0]);
  return num / (num + (1.0 - p1) * analytic::DensityClass0(x[0], nu));
}

BayesFactor BayesFactorFromPosterior(double posterior_y, double prior_y) {
  BayesFactor bf;
  double p = posterior_y;
  if (!(p >= kPosteriorClip)) {
    p = kPosteriorClip;
    bf.clipped = true;
  } else if (!(p <= 1.0 - kPosteriorClip)) {
    p = 1.0 - kPosteriorClip;
    bf.clipped = true;
  }
  bf.value = (p * (1.0 - prior_y)) / ((1.0 - p) * prior_y);
  return bf;
}

BayesFactor ComputeBayesFactor(const ClassifierModel& model, Label y,
                               std::span<const double> x) {
  const double p1 = model.Posterior1(x);
  return BayesFactorFromPosterior(y == Label::kOne ? p1 : 1.0 - p1,
                                  model.ClassPrior(y));
}

std::vector<double> Posterior1Batch(const ClassifierModel& model,
                                    const Dataset& data, int threads) {
  std::vector<double> out(data.size());
  ParallelFor(data.size(), threads, [&](std::size_t i) {
    out[i] = model.Posterior1(data.observation(i));
  });
  return out;
}

StatisticBatch StatisticFromPosteriors(const ClassifierModel& model, Label y,
                                       std::span<const double> posterior1) {
  StatisticBatch batch;
  batch.label = y;
  batch.values.resize(posterior1.size());
  const double prior = model.ClassPrior(y);
  for (std::size_t i = 0; i < posterior1.size(); ++i) {
    const double p = y == Label::kOne ? posterior1[i] : 1.0 - posterior1[i];
    const BayesFactor bf = BayesFactorFromPosterior(p, prior);
    batch.values[i] = bf.value;
    batch.clipped += bf.clipped ? 1 : 0;
  }
  return batch;
}

StatisticBatch ComputeStatistic(const ClassifierModel& model, Label y,
                                const Dataset& data, int threads) {
  const auto p1 = Posterior1Batch(model, data, threads);
  return StatisticFromPosteriors(model, y, p1);
}

ClassifierModel FitHistogramClassifier(const Dataset& data, int n_bins) {
  if (data.empty()) throw ConfigError("cannot fit a histogram on an empty dataset");
  if (n_bins < 1) throw ConfigError("histogram needs at least one bin");
  if (data.x_dim != 1) {
    throw ConfigError("histogram classifier requires a scalar observation");
  }
  HistogramModel h;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) h.edges[b] = static_cast<double>(b) / n_bins;
  std::vector<double> ones(n_bins, 0.0);
  std::vector<double> totals(n_bins, 0.0);
  double n1 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.x1(i);
    const int b = std::clamp(static_cast<int>(std::floor(x * n_bins)), 0, n_bins - 1);
    totals[b] += 1.0;
    if (data.y[i] == Label::kOne) {
      ones[b] += 1.0;
      n1 += 1.0;
    }
  }
  h.probability.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    h.probability[b] = (ones[b] + 1.0) / (totals[b] + 2.0);
  }
  const double n = static_cast<double>(data.size());
  h.class1_prior = (n1 + 1.0) / (n + 2.0);
  return ClassifierModel::Histogram(std::move(h));
}

double PosteriorMeanNu(const ClassifierModel& model, double x) {
  if (model.kind() == ClassifierModel::Kind::kHistogram ||
      model.train_config().scenario != Scenario::kAnalyticExponential) {
    throw ConfigError("posterior mean of nu requires the analytic scenario");
  }
  const GenerativeConfig& train = model.train_config();
  const PriorSpec& prior0 = train.prior_class0;
  const PriorSpec& prior1 = train.prior_class1;
  const double p1 = train.class1_probability;
  const double p0 = 1.0 - p1;
  const double f1 = analytic::DensityClass1(x);

  if (prior0.kind == PriorSpec::Kind::kPointMass &&
      prior1.kind == PriorSpec::Kind::kPointMass && prior0.point == prior1.point) {
    return prior0.point;
  }

  double mass0 = 0.0;
  double moment0 = 0.0;
  if (prior0.kind == PriorSpec::Kind::kPointMass) {
    mass0 = analytic::DensityClass0(x, prior0.point);
    moment0 = prior0.point * mass0;
  } else {
    const auto [a, b] = prior0.EffectiveSupport();
    const auto weight = [&](double nu) {
      return analytic::DensityClass0(x, nu) * prior0.Density(nu);
    };
    mass0 = internal::Integrate(weight, a, b, kQuadratureTolerance,
                                "posterior mean of nu (mass)");
    moment0 = internal::Integrate([&](double nu) { return nu * weight(nu); }, a,
                                  b, kQuadratureTolerance,
                                  "posterior mean of nu (moment)");
  }
  const double num = p0 * moment0 + p1 * f1 * prior1.Mean();
  const double den = p0 * mass0 + p1 * f1;
  return std::clamp(num / den, train.space().lo, train.space().hi);
}

double StatisticCutoffToX(const ClassifierModel& model, Label y, double cutoff) {
  if (model.kind() != ClassifierModel::Kind::kAnalyticMarginal ||
      model.train_config().scenario != Scenario::kAnalyticExponential) {
    throw ConfigError("x-scale mapping requires the analytic marginal classifier");
  }
  if (std::isinf(cutoff)) {
    const bool all = cutoff > 0;
    // y = 0 rejects x >= t, y = 1 rejects x <= t.
    if (y == Label::kZero) return all ? 0.0 : 1.0;
    return all ? 1.0 : 0.0;
  }
  const auto tau = [&](double x) { return ComputeBayesFactor(model, y, x).value; };
  // g is increasing in x for either label.
  const auto g = [&](double x) {
    return y == Label::kZero ? -tau(x) : tau(x);
  };
  const double target = y == Label::kZero ? -cutoff : cutoff;
  double lo = 0.0;
  double hi = 1.0;
  if (target <= g(lo)) return 0.0;
  if (target >= g(hi)) return 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace naps
