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

#ifndef NAPS_GENMODEL_HPP_
#define NAPS_GENMODEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naps/rng.hpp"

namespace naps {

enum class Label : std::uint8_t { kZero = 0, kOne = 1 };

inline constexpr int Index(Label y) { return static_cast<int>(y); }
inline constexpr Label Other(Label y) {
  return y == Label::kZero ? Label::kOne : Label::kZero;
}
Label LabelFromInt(int value);
inline constexpr std::array<Label, 2> kLabels = {Label::kZero, Label::kOne};

// The nuisance parameter space: an interval [lo, hi] or a finite set of
// named categories. Categorical nuisance values are carried as the category
// index stored in a double.
struct NuisanceSpace {
  enum class Kind { kContinuous, kDiscrete };

  Kind kind = Kind::kContinuous;
  double lo = 1.0;
  double hi = 10.0;
  std::vector<std::string> categories;

  static NuisanceSpace Continuous(double lo, double hi);
  static NuisanceSpace Discrete(std::vector<std::string> categories);

  bool is_continuous() const { return kind == Kind::kContinuous; }
  std::size_t num_categories() const { return categories.size(); }
  bool Contains(double nu) const;
  void Validate() const;

  friend bool operator==(const NuisanceSpace&, const NuisanceSpace&) = default;
};

// Distribution of the nuisance parameter.
struct PriorSpec {
  enum class Kind { kUniform, kTruncatedGaussian, kDiscreteWeights, kPointMass };

  Kind kind = Kind::kUniform;
  double mean = 0.0;   // truncated gaussian location
  double sd = 1.0;     // truncated gaussian standard deviation
  std::vector<double> weights;  // discrete weights, one per category
  double point = 0.0;  // point mass location
  NuisanceSpace support;

  static PriorSpec Uniform(NuisanceSpace space);
  static PriorSpec TruncatedGaussian(double mean, double sd, NuisanceSpace space);
  static PriorSpec DiscreteWeights(std::vector<double> weights, NuisanceSpace space);
  static PriorSpec PointMass(double value, NuisanceSpace space);

  void Validate() const;

  // Density with respect to Lebesgue measure on the support (continuous
  // kinds only).
  double Density(double nu) const;
  double Cdf(double nu) const;
  // Inverse CDF. For discrete weights returns the category index.
  double Quantile(double u) const;
  double Mean() const;
  // Interval carrying all but a negligible fraction of the mass.
  std::pair<double, double> EffectiveSupport() const;

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

enum class Scenario { kAnalyticExponential, kDiscreteToy };

inline constexpr int kToyProtocols = 4;
inline constexpr int kToyDims = 8;
// Poisson rates indexed [label][protocol][dimension].
using ToyRates =
    std::array<std::array<std::array<double, kToyDims>, kToyProtocols>, 2>;

// log rate = log(4) + 0.4 * s_d * (2y - 1) + 0.25 * (p - 1.5) * t_d, with
// s = (+,+,+,+,-,-,-,-) and t alternating (+,-,+,-,...).
ToyRates DefaultToyRates();

struct GenerativeConfig {
  Scenario scenario = Scenario::kAnalyticExponential;
  double class1_probability = 0.5;
  PriorSpec prior_class0;
  PriorSpec prior_class1;
  ToyRates toy_rates = DefaultToyRates();
  // Multiplies nu inside the class-0 likelihood when drawing x. 1 leaves the
  // model untouched; any other value deliberately breaks p(x | y, nu)
  // equality between simulators.
  double class0_rate_multiplier = 1.0;

  void Validate() const;
  const PriorSpec& prior(Label y) const {
    return y == Label::kOne ? prior_class1 : prior_class0;
  }
  const NuisanceSpace& space() const { return prior_class0.support; }
};

// The analytic benchmark with nu ~ U[1, 10] for both classes.
GenerativeConfig AnalyticConfig(double class1_probability = 0.5);
// Same model with nu ~ N(mean, sd) truncated to [1, 10].
GenerativeConfig AnalyticShiftedConfig(double mean = 4.0, double sd = 0.1,
                                       double class1_probability = 0.5);
// Four-protocol count model.
GenerativeConfig DiscreteToyConfig(std::vector<double> protocol_weights = {0.4, 0.3, 0.2, 0.1});

// Column-oriented sample collection. Observations are stored row-major with
// `x_dim` values per sample.
struct Dataset {
  Scenario scenario = Scenario::kAnalyticExponential;
  std::size_t x_dim = 1;
  std::vector<Label> y;
  std::vector<double> nu;
  std::vector<double> x;

  std::size_t size() const { return y.size(); }
  bool empty() const { return y.empty(); }
  std::span<const double> observation(std::size_t i) const {
    return {x.data() + i * x_dim, x_dim};
  }
  // Scalar observation, analytic scenario only.
  double x1(std::size_t i) const { return x[i * x_dim]; }
  void Reserve(std::size_t n);

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace analytic {

inline constexpr double kNuMin = 1.0;
inline constexpr double kNuMax = 10.0;

double DensityClass1(double x);
double DensityClass0(double x, double nu);
double CdfClass1(double x);
double QuantileClass1(double alpha);
double SurvivalClass0(double x, double nu);
// x such that P[X >= x | Y = 0, nu] = alpha.
double UpperQuantileClass0(double alpha, double nu);

// Unchecked variants used by samplers with distorted likelihoods.
double DrawClass1(double u);
double DrawClass0(double u, double nu);

}  // namespace analytic

// Draws n samples (y, nu, x) from `config`. Sample i only depends on
// (seed, stream, i).
// One observation from p(x | y, nu), written to out[0 .. x_dim).
void DrawObservation(const GenerativeConfig& config, Label y, double nu,
                     SampleRng& rng, double* out);

Dataset SampleDataset(const GenerativeConfig& config, std::size_t n,
                      std::uint64_t seed,
                      std::uint32_t stream = StreamId(Stream::kCalibration),
                      int threads = 1);

// Discrete-toy counterpart; SampleDataset dispatches here for that scenario.
Dataset SampleDiscreteToy(const GenerativeConfig& config, std::size_t n,
                          std::uint64_t seed,
                          std::uint32_t stream = StreamId(Stream::kCalibration),
                          int threads = 1);

// n draws of x from p(x | y, nu) with the label and nuisance held fixed.
Dataset SampleConditional(const GenerativeConfig& config, Label y, double nu,
                          std::size_t n, std::uint64_t seed,
                          std::uint32_t stream, int threads = 1);

}  // namespace naps

#endif  // NAPS_GENMODEL_HPP_
