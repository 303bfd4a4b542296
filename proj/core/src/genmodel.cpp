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

#include "naps/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "naps/error.hpp"

namespace naps {
namespace {

constexpr double kE = 2.718281828459045235360287;

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void RequireUnit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + ": argument " + Fmt(v) +
                      " outside [0, 1]");
  }
}

void RequireNu(double nu, const char* what) {
  if (!(nu >= analytic::kNuMin && nu <= analytic::kNuMax)) {
    throw DomainError(std::string(what) + ": nu = " + Fmt(nu) +
                      " outside [1, 10]");
  }
}

// Default-constructed per use: safe during static initialization elsewhere.
using StdNormal = boost::math::normal_distribution<double>;

// Inverse-CDF Poisson draw by sequential search; rates here are O(10).
int DrawPoisson(double rate, double u) {
  double pmf = std::exp(-rate);
  double cdf = pmf;
  int k = 0;
  while (u > cdf && k < 10000) {
    ++k;
    pmf *= rate / k;
    cdf += pmf;
    if (pmf == 0.0 && cdf < u) break;
  }
  return k;
}

}  // namespace

Label LabelFromInt(int value) {
  if (value == 0) return Label::kZero;
  if (value == 1) return Label::kOne;
  throw ConfigError("label must be 0 or 1, got " + std::to_string(value));
}

// NuisanceSpace ---------------------------------------------------------------

NuisanceSpace NuisanceSpace::Continuous(double lo, double hi) {
  NuisanceSpace s;
  s.kind = Kind::kContinuous;
  s.lo = lo;
  s.hi = hi;
  s.Validate();
  return s;
}

NuisanceSpace NuisanceSpace::Discrete(std::vector<std::string> categories) {
  NuisanceSpace s;
  s.kind = Kind::kDiscrete;
  s.lo = 0.0;
  s.hi = categories.empty() ? 0.0 : static_cast<double>(categories.size() - 1);
  s.categories = std::move(categories);
  s.Validate();
  return s;
}

bool NuisanceSpace::Contains(double nu) const {
  if (is_continuous()) return nu >= lo && nu <= hi;
  return nu >= 0.0 && nu == std::floor(nu) &&
         nu < static_cast<double>(categories.size());
}

void NuisanceSpace::Validate() const {
  if (is_continuous()) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw ConfigError("continuous nuisance space requires lo < hi, got [" +
                        Fmt(lo) + ", " + Fmt(hi) + "]");
    }
    return;
  }
  if (categories.empty()) {
    throw ConfigError("discrete nuisance space must be nonempty");
  }
  std::set<std::string> unique(categories.begin(), categories.end());
  if (unique.size() != categories.size()) {
    throw ConfigError("discrete nuisance categories must be unique");
  }
}

// PriorSpec -------------------------------------------------------------------

PriorSpec PriorSpec::Uniform(NuisanceSpace space) {
  PriorSpec p;
  p.kind = Kind::kUniform;
  p.support = std::move(space);
  p.Validate();
  return p;
}

PriorSpec PriorSpec::TruncatedGaussian(double mean, double sd,
                                       NuisanceSpace space) {
  PriorSpec p;
  p.kind = Kind::kTruncatedGaussian;
  p.mean = mean;
  p.sd = sd;
  p.support = std::move(space);
  p.Validate();
  return p;
}

PriorSpec PriorSpec::DiscreteWeights(std::vector<double> weights,
                                     NuisanceSpace space) {
  PriorSpec p;
  p.kind = Kind::kDiscreteWeights;
  p.weights = std::move(weights);
  p.support = std::move(space);
  p.Validate();
  return p;
}

PriorSpec PriorSpec::PointMass(double value, NuisanceSpace space) {
  PriorSpec p;
  p.kind = Kind::kPointMass;
  p.point = value;
  p.support = std::move(space);
  p.Validate();
  return p;
}

void PriorSpec::Validate() const {
  support.Validate();
  switch (kind) {
    case Kind::kUniform:
      if (!support.is_continuous()) {
        throw ConfigError("uniform prior requires a continuous nuisance space");
      }
      break;
    case Kind::kTruncatedGaussian:
      if (!support.is_continuous()) {
        throw ConfigError(
            "truncated-gaussian prior requires a continuous nuisance space");
      }
      if (!(sd > 0.0) || !std::isfinite(mean)) {
        throw ConfigError("truncated-gaussian prior requires sd > 0");
      }
      if (!(Cdf(support.hi) > 0.0)) {
        throw ConfigError("truncated-gaussian prior has no mass on its support");
      }
      break;
    case Kind::kDiscreteWeights: {
      if (support.is_continuous()) {
        throw ConfigError("discrete-weights prior requires a discrete space");
      }
      if (weights.size() != support.num_categories()) {
        throw ConfigError("discrete-weights prior needs one weight per category");
      }
      double total = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("prior weights must be nonnegative");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("prior weights must sum to 1, got " + Fmt(total));
      }
      break;
    }
    case Kind::kPointMass:
      if (!support.Contains(point)) {
        throw ConfigError("point-mass prior location " + Fmt(point) +
                          " outside its support");
      }
      break;
  }
}

double PriorSpec::Density(double nu) const {
  if (!support.Contains(nu)) return 0.0;
  switch (kind) {
    case Kind::kUniform:
      return 1.0 / (support.hi - support.lo);
    case Kind::kTruncatedGaussian: {
      const double z = (nu - mean) / sd;
      const double mass =
          boost::math::cdf(StdNormal(), (support.hi - mean) / sd) -
          boost::math::cdf(StdNormal(), (support.lo - mean) / sd);
      return boost::math::pdf(StdNormal(), z) / (sd * mass);
    }
    case Kind::kDiscreteWeights:
      return weights[static_cast<std::size_t>(nu)];
    case Kind::kPointMass:
      throw DomainError("point-mass prior has no density");
  }
  return 0.0;
}

double PriorSpec::Cdf(double nu) const {
  switch (kind) {
    case Kind::kUniform:
      return std::clamp((nu - support.lo) / (support.hi - support.lo), 0.0, 1.0);
    case Kind::kTruncatedGaussian: {
      const double a = boost::math::cdf(StdNormal(), (support.lo - mean) / sd);
      const double b = boost::math::cdf(StdNormal(), (support.hi - mean) / sd);
      const double v = std::clamp(nu, support.lo, support.hi);
      return std::clamp(
          (boost::math::cdf(StdNormal(), (v - mean) / sd) - a) / (b - a), 0.0,
          1.0);
    }
    case Kind::kDiscreteWeights: {
      if (nu < 0.0) return 0.0;
      const std::size_t upto = std::min<std::size_t>(
          static_cast<std::size_t>(std::floor(nu)) + 1, weights.size());
      return std::min(1.0, std::accumulate(weights.begin(),
                                           weights.begin() + upto, 0.0));
    }
    case Kind::kPointMass:
      return nu >= point ? 1.0 : 0.0;
  }
  return 0.0;
}

double PriorSpec::Quantile(double u) const {
  RequireUnit(u, "prior quantile");
  switch (kind) {
    case Kind::kUniform:
      return support.lo + u * (support.hi - support.lo);
    case Kind::kTruncatedGaussian: {
      const double za = (support.lo - mean) / sd;
      const double zb = (support.hi - mean) / sd;
      if (u == 0.0) return support.lo;
      if (u == 1.0) return support.hi;
      // Work in whichever tail keeps the probabilities away from 1.
      double z;
      if (u <= 0.5) {
        const double a = boost::math::cdf(StdNormal(), za);
        const double b = boost::math::cdf(StdNormal(), zb);
        z = boost::math::quantile(StdNormal(), a + u * (b - a));
      } else {
        const double a = boost::math::cdf(boost::math::complement(StdNormal(), za));
        const double b = boost::math::cdf(boost::math::complement(StdNormal(), zb));
        const double tail = b + (1.0 - u) * (a - b);
        z = boost::math::quantile(boost::math::complement(StdNormal(), tail));
      }
      return std::clamp(mean + sd * z, support.lo, support.hi);
    }
    case Kind::kDiscreteWeights: {
      double cum = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        cum += weights[k];
        if (u < cum) return static_cast<double>(k);
      }
      for (std::size_t k = weights.size(); k-- > 0;) {
        if (weights[k] > 0.0) return static_cast<double>(k);
      }
      return 0.0;
    }
    case Kind::kPointMass:
      return point;
  }
  return 0.0;
}

double PriorSpec::Mean() const {
  switch (kind) {
    case Kind::kUniform:
      return 0.5 * (support.lo + support.hi);
    case Kind::kTruncatedGaussian: {
      const double za = (support.lo - mean) / sd;
      const double zb = (support.hi - mean) / sd;
      const double mass =
          boost::math::cdf(StdNormal(), zb) - boost::math::cdf(StdNormal(), za);
      return mean + sd *
                        (boost::math::pdf(StdNormal(), za) -
                         boost::math::pdf(StdNormal(), zb)) /
                        mass;
    }
    case Kind::kDiscreteWeights: {
      double m = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) m += k * weights[k];
      return m;
    }
    case Kind::kPointMass:
      return point;
  }
  return 0.0;
}

std::pair<double, double> PriorSpec::EffectiveSupport() const {
  switch (kind) {
    case Kind::kTruncatedGaussian:
      return {std::max(support.lo, mean - 12.0 * sd),
              std::min(support.hi, mean + 12.0 * sd)};
    case Kind::kPointMass:
      return {point, point};
    default:
      return {support.lo, support.hi};
  }
}

// GenerativeConfig ------------------------------------------------------------

ToyRates DefaultToyRates() {
  ToyRates rates{};
  for (int y = 0; y < 2; ++y) {
    for (int p = 0; p < kToyProtocols; ++p) {
      for (int d = 0; d < kToyDims; ++d) {
        const double s = d < kToyDims / 2 ? 1.0 : -1.0;
        const double t = d % 2 == 0 ? 1.0 : -1.0;
        rates[y][p][d] = std::exp(std::log(4.0) + 0.4 * s * (2 * y - 1) +
                                  0.25 * (p - 1.5) * t);
      }
    }
  }
  return rates;
}

void GenerativeConfig::Validate() const {
  if (!(class1_probability >= 0.0 && class1_probability <= 1.0)) {
    throw ConfigError("class1_probability must lie in [0, 1]");
  }
  prior_class0.Validate();
  prior_class1.Validate();
  if (!(prior_class0.support == prior_class1.support)) {
    throw ConfigError("class priors must share a nuisance space");
  }
  if (!(class0_rate_multiplier > 0.0)) {
    throw ConfigError("class0_rate_multiplier must be positive");
  }
  const bool continuous = space().is_continuous();
  if (scenario == Scenario::kAnalyticExponential) {
    if (!continuous || space().lo < analytic::kNuMin ||
        space().hi > analytic::kNuMax) {
      throw ConfigError(
          "analytic scenario requires a continuous nuisance space within [1, 10]");
    }
  } else {
    if (continuous || space().num_categories() != kToyProtocols) {
      throw ConfigError("discrete toy scenario requires 4 protocol categories");
    }
    for (const auto& per_label : toy_rates) {
      for (const auto& per_protocol : per_label) {
        for (double r : per_protocol) {
          if (!(r > 0.0)) throw ConfigError("toy Poisson rates must be positive");
        }
      }
    }
  }
}

GenerativeConfig AnalyticConfig(double class1_probability) {
  GenerativeConfig c;
  c.scenario = Scenario::kAnalyticExponential;
  c.class1_probability = class1_probability;
  const auto space = NuisanceSpace::Continuous(analytic::kNuMin, analytic::kNuMax);
  c.prior_class0 = PriorSpec::Uniform(space);
  c.prior_class1 = PriorSpec::Uniform(space);
  return c;
}

GenerativeConfig AnalyticShiftedConfig(double mean, double sd,
                                       double class1_probability) {
  GenerativeConfig c = AnalyticConfig(class1_probability);
  c.prior_class0 = PriorSpec::TruncatedGaussian(mean, sd, c.space());
  c.prior_class1 = PriorSpec::TruncatedGaussian(mean, sd, c.space());
  return c;
}

GenerativeConfig DiscreteToyConfig(std::vector<double> protocol_weights) {
  GenerativeConfig c;
  c.scenario = Scenario::kDiscreteToy;
  const auto space = NuisanceSpace::Discrete({"A", "B", "C", "D"});
  c.prior_class0 = PriorSpec::DiscreteWeights(protocol_weights, space);
  c.prior_class1 = PriorSpec::DiscreteWeights(std::move(protocol_weights), space);
  return c;
}

void Dataset::Reserve(std::size_t n) {
  y.reserve(n);
  nu.reserve(n);
  x.reserve(n * x_dim);
}

// Analytic densities ----------------------------------------------------------

namespace analytic {

double DensityClass1(double x) {
  RequireUnit(x, "density_class1");
  return std::exp(x) / (kE - 1.0);
}

double DensityClass0(double x, double nu) {
  RequireUnit(x, "density_class0");
  RequireNu(nu, "density_class0");
  return nu * std::exp(-nu * x) / -std::expm1(-nu);
}

double CdfClass1(double x) {
  RequireUnit(x, "cdf_class1");
  return std::expm1(x) / (kE - 1.0);
}

double QuantileClass1(double alpha) {
  RequireUnit(alpha, "quantile_class1");
  return std::log1p(alpha * (kE - 1.0));
}

double SurvivalClass0(double x, double nu) {
  RequireUnit(x, "survival_class0");
  RequireNu(nu, "survival_class0");
  return (std::exp(-nu * x) - std::exp(-nu)) / -std::expm1(-nu);
}

double UpperQuantileClass0(double alpha, double nu) {
  RequireNu(nu, "upper_quantile_class0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("upper_quantile_class0: alpha = " + Fmt(alpha) +
                      " outside (0, 1]");
  }
  const double x = -std::log(alpha * -std::expm1(-nu) + std::exp(-nu)) / nu;
  return std::clamp(x, 0.0, 1.0);
}

double DrawClass1(double u) { return std::log1p(u * (kE - 1.0)); }

double DrawClass0(double u, double nu) {
  return std::clamp(-std::log1p(u * std::expm1(-nu)) / nu, 0.0, 1.0);
}

}  // namespace analytic

// Sampling --------------------------------------------------------------------

namespace {

void ResizeFor(Dataset& d, Scenario scenario, std::size_t n) {
  d.scenario = scenario;
  d.x_dim = scenario == Scenario::kDiscreteToy ? kToyDims : 1;
  d.y.assign(n, Label::kZero);
  d.nu.assign(n, 0.0);
  d.x.assign(n * d.x_dim, 0.0);
}

}  // namespace

void DrawObservation(const GenerativeConfig& config, Label y, double nu,
                     SampleRng& rng, double* out) {
  if (config.scenario == Scenario::kAnalyticExponential) {
    const double u = rng.Uniform();
    out[0] = y == Label::kOne
                 ? analytic::DrawClass1(u)
                 : analytic::DrawClass0(u, nu * config.class0_rate_multiplier);
    return;
  }
  const auto protocol = static_cast<std::size_t>(nu);
  for (int d = 0; d < kToyDims; ++d) {
    double rate = config.toy_rates[Index(y)][protocol][d];
    if (y == Label::kZero) rate *= config.class0_rate_multiplier;
    out[d] = DrawPoisson(rate, rng.Uniform());
  }
}

Dataset SampleDataset(const GenerativeConfig& config, std::size_t n,
                      std::uint64_t seed, std::uint32_t stream, int threads) {
  config.Validate();
  if (n < 1) throw ConfigError("sample size must be at least 1");
  Dataset d;
  ResizeFor(d, config.scenario, n);
  ParallelFor(n, threads, [&](std::size_t i) {
    SampleRng rng(seed, stream, i);
    const Label y =
        rng.Uniform() < config.class1_probability ? Label::kOne : Label::kZero;
    const double nu = config.prior(y).Quantile(rng.Uniform());
    d.y[i] = y;
    d.nu[i] = nu;
    DrawObservation(config, y, nu, rng, d.x.data() + i * d.x_dim);
  });
  return d;
}

Dataset SampleDiscreteToy(const GenerativeConfig& config, std::size_t n,
                          std::uint64_t seed, std::uint32_t stream,
                          int threads) {
  if (config.scenario != Scenario::kDiscreteToy) {
    throw ConfigError("SampleDiscreteToy requires the discrete-toy scenario");
  }
  return SampleDataset(config, n, seed, stream, threads);
}

Dataset SampleConditional(const GenerativeConfig& config, Label y, double nu,
                          std::size_t n, std::uint64_t seed,
                          std::uint32_t stream, int threads) {
  config.Validate();
  if (!config.space().Contains(nu)) {
    throw DomainError("SampleConditional: nu = " + Fmt(nu) +
                      " outside the nuisance space");
  }
  Dataset d;
  ResizeFor(d, config.scenario, n);
  ParallelFor(n, threads, [&](std::size_t i) {
    SampleRng rng(seed, stream, i);
    d.y[i] = y;
    d.nu[i] = nu;
    DrawObservation(config, y, nu, rng, d.x.data() + i * d.x_dim);
  });
  return d;
}

}  // namespace naps
