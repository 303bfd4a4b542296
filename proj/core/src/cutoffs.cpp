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

#include "naps/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {
namespace {

std::string Describe(const CutoffRequest& r) {
  std::string s = r.mode == ErrorMode::kFpr ? "fpr" : "tpr";
  s += " y=" + std::to_string(Index(r.null_label)) + " alpha=" +
       FormatShort(r.alpha) + " gamma=" + FormatShort(r.gamma);
  switch (r.scope.kind) {
    case NuScope::Kind::kFixed:
      return s + " fixed nu=" + FormatShort(r.scope.nu0);
    case NuScope::Kind::kUniform:
      return s + " uniform";
    case NuScope::Kind::kConfidenceSet:
      return s + (r.scope.provider.kind == NuisanceSetProvider::Kind::kFullSpace
                      ? " confidence-set full-space"
                      : " confidence-set oracle-quantile");
  }
  return s;
}

// Optimum over the given bins (inf for FPR, sup for TPR).
CutoffResult Optimize(const RejectionSurface& surface, const CutoffRequest& request,
                      const std::vector<std::size_t>& bins) {
  if (bins.empty()) {
    throw ConfigError("cutoff search over an empty nuisance region");
  }
  const Label label = request.SurfaceLabel();
  const double beta = request.Beta();
  const bool minimize = request.mode == ErrorMode::kFpr;
  const NuBinning& binning = surface.binning();

  CutoffResult result;
  result.scope = Describe(request);
  std::vector<double> values(bins.size());
  std::string saturated;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    try {
      values[i] = surface.InvertBin(beta, label, bins[i]);
    } catch (const SaturationError& e) {
      result.saturated_bins.push_back(bins[i]);
      saturated += "\n  " + std::string(e.what());
    }
  }
  if (!result.saturated_bins.empty()) {
    throw SaturationError("cutoff saturated in " +
                              std::to_string(result.saturated_bins.size()) +
                              " cell(s) for " + result.scope + ":" + saturated,
                          0.0);
  }
  double best = values[0];
  for (double v : values) best = minimize ? std::min(best, v) : std::max(best, v);
  result.cutoff = best;
  bool first = true;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (values[i] != best) continue;
    const double rep = binning.Representative(bins[i]);
    result.optima_nu.push_back(rep);
    if (first || rep < result.arg_nu) {
      result.arg_nu = rep;
      result.arg_bin = bins[i];
      first = false;
    }
  }
  result.saturated = std::isinf(best);
  return result;
}

std::vector<std::size_t> AllBins(const RejectionSurface& surface) {
  std::vector<std::size_t> bins(surface.binning().num_bins());
  for (std::size_t b = 0; b < bins.size(); ++b) bins[b] = b;
  return bins;
}

}  // namespace

NuScope NuScope::Fixed(double nu0) {
  NuScope s;
  s.kind = Kind::kFixed;
  s.nu0 = nu0;
  return s;
}

NuScope NuScope::Uniform() { return NuScope{}; }

NuScope NuScope::ConfidenceSet(NuisanceSetProvider provider) {
  NuScope s;
  s.kind = Kind::kConfidenceSet;
  s.provider = std::move(provider);
  return s;
}

double CutoffRequest::Beta() const {
  return mode == ErrorMode::kFpr ? alpha - gamma : alpha + gamma;
}

void CutoffRequest::Validate() const {
  const bool fixed = scope.kind == NuScope::Kind::kFixed;
  // alpha = 1 is accepted for a fixed nu (reject everything).
  if (!(alpha > 0.0 && (alpha < 1.0 || (fixed && alpha == 1.0)))) {
    throw ConfigError("alpha = " + FormatShort(alpha) + " outside (0, 1)");
  }
  if (fixed && gamma != 0.0) {
    throw ConfigError("a fixed-nu cutoff takes gamma = 0");
  }
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  const double beta = Beta();
  if (mode == ErrorMode::kFpr) {
    if (!(gamma < alpha || (gamma == 0.0))) {
      throw ConfigError("FPR control needs gamma < alpha (got gamma = " +
                        FormatShort(gamma) + ", alpha = " + FormatShort(alpha) + ")");
    }
  } else if (!(beta < 1.0 || (fixed && beta == 1.0))) {
    throw ConfigError("TPR control needs alpha + gamma < 1");
  }
  if (scope.kind == NuScope::Kind::kConfidenceSet) {
    scope.provider.Validate();
    if (scope.provider.gamma != gamma) {
      throw ConfigError("confidence-set gamma differs from the request gamma");
    }
  }
}

CutoffResult FixedNuCutoff(const RejectionSurface& surface,
                           const CutoffRequest& request) {
  if (request.scope.kind != NuScope::Kind::kFixed) {
    throw ConfigError("fixed-nu cutoff needs a fixed scope");
  }
  request.Validate();
  const std::size_t bin = surface.binning().BinOf(request.scope.nu0);
  CutoffResult r = Optimize(surface, request, {bin});
  return r;
}

CutoffResult UniformCutoff(const RejectionSurface& surface,
                           const CutoffRequest& request) {
  if (request.scope.kind != NuScope::Kind::kUniform) {
    throw ConfigError("uniform cutoff needs a uniform scope");
  }
  request.Validate();
  return Optimize(surface, request, AllBins(surface));
}

CutoffResult RegionCutoff(const RejectionSurface& surface,
                          const NuisanceRegion& region,
                          const CutoffRequest& request) {
  request.Validate();
  if (region.empty()) throw ConfigError("cutoff search over an empty nuisance region");
  const NuBinning& binning = surface.binning();
  // A region covering every bin is the uniform search.
  std::vector<std::size_t> bins;
  for (std::size_t b = 0; b < binning.num_bins(); ++b) {
    const auto [lo, hi] = binning.Range(b);
    if (region.Intersects(lo, hi)) bins.push_back(b);
  }
  return Optimize(surface, request, bins);
}

CutoffResult DataDependentCutoff(const RejectionSurface& surface,
                                 std::span<const double> x,
                                 const CutoffRequest& request) {
  if (request.scope.kind != NuScope::Kind::kConfidenceSet) {
    throw ConfigError("data-dependent cutoff needs a confidence-set scope");
  }
  request.Validate();
  const NuisanceRegion region =
      request.scope.provider.SetFor(x, request.SurfaceLabel());
  return RegionCutoff(surface, region, request);
}

namespace analytic {

double X0(double nu, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw DomainError("X0: beta = " + FormatShort(beta) + " outside (0, 1]");
  }
  return UpperQuantileClass0(beta, nu);
}

double X1Star(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("X1Star: alpha = " + FormatShort(alpha) + " outside (0, 1)");
  }
  return QuantileClass1(alpha);
}

OracleCutoffs OracleCutoffsFor(double alpha, double gamma,
                               const NuisanceRegion& region) {
  const double beta = alpha - gamma;
  if (!(beta > 0.0)) {
    throw ConfigError("oracle cutoff needs alpha - gamma > 0 (alpha = " +
                      FormatShort(alpha) + ", gamma = " + FormatShort(gamma) + ")");
  }
  if (!region.continuous || region.empty()) {
    throw ConfigError("oracle cutoff needs a nonempty continuous region");
  }
  constexpr int kGrid = 2000;
  OracleCutoffs out;
  out.x1_star = X1Star(alpha);
  out.x0_star = -std::numeric_limits<double>::infinity();
  for (const Interval& iv : region.intervals) {
    if (iv.lo == iv.hi) {
      const double v = X0(iv.lo, beta);
      if (v > out.x0_star) {
        out.x0_star = v;
        out.x0_arg_nu = iv.lo;
      }
      continue;
    }
    const double step = (iv.hi - iv.lo) / (kGrid - 1);
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
      const double nu = i == kGrid - 1 ? iv.hi : iv.lo + step * i;
      const double v = X0(nu, beta);
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    double arg = best == kGrid - 1 ? iv.hi : iv.lo + step * best;
    const double a = std::max(iv.lo, arg - step);
    const double b = std::min(iv.hi, arg + step);
    const auto refined = boost::math::tools::brent_find_minima(
        [beta](double nu) { return -X0(nu, beta); }, a, b, 52);
    if (-refined.second > best_value) {
      best_value = -refined.second;
      arg = refined.first;
    }
    if (best_value > out.x0_star) {
      out.x0_star = best_value;
      out.x0_arg_nu = arg;
    }
  }
  return out;
}

}  // namespace analytic

}  // namespace naps
