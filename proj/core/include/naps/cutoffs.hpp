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

#ifndef NAPS_CUTOFFS_HPP_
#define NAPS_CUTOFFS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "naps/nuisance.hpp"
#include "naps/rejection.hpp"

namespace naps {

enum class ErrorMode { kFpr, kTpr };

struct NuScope {
  enum class Kind { kFixed, kUniform, kConfidenceSet };

  Kind kind = Kind::kUniform;
  double nu0 = 0.0;                 // fixed only
  NuisanceSetProvider provider;     // confidence-set only

  static NuScope Fixed(double nu0);
  static NuScope Uniform();
  static NuScope ConfidenceSet(NuisanceSetProvider provider);
};

// For FPR control of H_{0,y}: beta = alpha - gamma, optimum = inf over
// S_y(x) of W^{-1}(beta; y, nu).
// For TPR control: beta = alpha + gamma, optimum = sup over S_{1-y}(x) of
// W^{-1}(beta; 1 - y, nu), on the same statistic tau_y.
struct CutoffRequest {
  Label null_label = Label::kZero;
  double alpha = 0.05;
  double gamma = 0.0;
  ErrorMode mode = ErrorMode::kFpr;
  NuScope scope;

  double Beta() const;
  // Label whose cells the optimum runs over.
  Label SurfaceLabel() const {
    return mode == ErrorMode::kFpr ? null_label : Other(null_label);
  }
  void Validate() const;
};

struct CutoffResult {
  double cutoff = 0.0;             // statistic scale
  double arg_nu = 0.0;             // representative nu of the optimum (smallest on ties)
  std::size_t arg_bin = 0;
  std::vector<double> optima_nu;   // every bin attaining the optimum
  std::string scope;
  bool saturated = false;
  std::vector<std::size_t> saturated_bins;
};

CutoffResult FixedNuCutoff(const RejectionSurface& surface,
                           const CutoffRequest& request);
CutoffResult UniformCutoff(const RejectionSurface& surface,
                           const CutoffRequest& request);
CutoffResult DataDependentCutoff(const RejectionSurface& surface,
                                 std::span<const double> x,
                                 const CutoffRequest& request);

// Optimum restricted to the bins meeting `region`.
CutoffResult RegionCutoff(const RejectionSurface& surface,
                          const NuisanceRegion& region,
                          const CutoffRequest& request);

// Closed-form thresholds of the analytic scenario, x scale.
namespace analytic {

// Upper beta-quantile of the class-0 density at nu.
double X0(double nu, double beta);
// Lower alpha-quantile of the class-1 density.
double X1Star(double alpha);

struct OracleCutoffs {
  double x0_star = 0.0;
  double x0_arg_nu = 0.0;
  double x1_star = 0.0;
};

// x0* = sup over the region of X0(nu; alpha - gamma); x1* = X1Star(alpha).
OracleCutoffs OracleCutoffsFor(double alpha, double gamma,
                               const NuisanceRegion& region);

}  // namespace analytic

}  // namespace naps

#endif  // NAPS_CUTOFFS_HPP_
