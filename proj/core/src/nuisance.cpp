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

#include "naps/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {
namespace {

// Intervals narrower than this (relative to the support) are degenerate.
constexpr double kMinRelativeWidth = 1e-12;

void Tally(CoverageRow& row, double gamma) {
  row.coverage = static_cast<double>(row.covered) / static_cast<double>(row.n);
  row.standard_error = std::sqrt(gamma * (1.0 - gamma) / static_cast<double>(row.n));
  row.flagged = row.coverage < 1.0 - gamma - 3.0 * row.standard_error;
}

}  // namespace

NuisanceRegion NuisanceRegion::FromIntervals(std::vector<Interval> intervals,
                                             const NuisanceSpace& space) {
  if (!space.is_continuous()) {
    throw ConfigError("interval region requires a continuous nuisance space");
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const Interval& iv = intervals[i];
    if (!(iv.lo <= iv.hi) || iv.lo < space.lo || iv.hi > space.hi) {
      throw ConfigError("region interval [" + FormatShort(iv.lo) + ", " +
                        FormatShort(iv.hi) + "] outside the nuisance space");
    }
    if (i > 0 && !(iv.lo > intervals[i - 1].hi)) {
      throw ConfigError("region intervals overlap");
    }
  }
  if (intervals.empty()) throw ConfigError("region is empty; use Empty()");
  NuisanceRegion r;
  r.continuous = true;
  r.intervals = std::move(intervals);
  return r;
}

NuisanceRegion NuisanceRegion::FromCategories(std::vector<std::size_t> categories,
                                              const NuisanceSpace& space) {
  if (space.is_continuous()) {
    throw ConfigError("category region requires a discrete nuisance space");
  }
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()),
                   categories.end());
  if (categories.empty()) throw ConfigError("region is empty; use Empty()");
  if (categories.back() >= space.num_categories()) {
    throw ConfigError("region category outside the nuisance space");
  }
  NuisanceRegion r;
  r.continuous = false;
  r.categories = std::move(categories);
  return r;
}

NuisanceRegion NuisanceRegion::Empty(const NuisanceSpace& space) {
  NuisanceRegion r;
  r.continuous = space.is_continuous();
  r.flagged_empty = true;
  return r;
}

bool NuisanceRegion::empty() const {
  return continuous ? intervals.empty() : categories.empty();
}

bool NuisanceRegion::Contains(double nu) const {
  if (continuous) {
    return std::any_of(intervals.begin(), intervals.end(), [nu](const Interval& iv) {
      return nu >= iv.lo && nu <= iv.hi;
    });
  }
  if (nu < 0.0 || nu != std::floor(nu)) return false;
  return std::binary_search(categories.begin(), categories.end(),
                            static_cast<std::size_t>(nu));
}

bool NuisanceRegion::Intersects(double lo, double hi) const {
  if (continuous) {
    return std::any_of(intervals.begin(), intervals.end(), [&](const Interval& iv) {
      return iv.lo <= hi && iv.hi >= lo;
    });
  }
  return Contains(lo);
}

double NuisanceRegion::Width() const {
  if (!continuous) return static_cast<double>(categories.size());
  double w = 0.0;
  for (const Interval& iv : intervals) w += iv.hi - iv.lo;
  return w;
}

NuisanceSetProvider NuisanceSetProvider::FullSpace(NuisanceSpace space) {
  NuisanceSetProvider p;
  p.kind = Kind::kFullSpace;
  p.space = std::move(space);
  p.distribution = PriorSpec::Uniform(p.space);
  return p;
}

NuisanceSetProvider NuisanceSetProvider::OracleQuantile(PriorSpec distribution,
                                                        double gamma) {
  NuisanceSetProvider p;
  p.kind = Kind::kOracleQuantile;
  p.gamma = gamma;
  p.space = distribution.support;
  p.distribution = std::move(distribution);
  p.Validate();
  return p;
}

void NuisanceSetProvider::Validate() const {
  space.Validate();
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("nuisance set gamma = " + FormatShort(gamma) +
                      " outside [0, 1)");
  }
  if (kind == Kind::kOracleQuantile) {
    distribution.Validate();
    if (!(distribution.support == space)) {
      throw ConfigError("oracle distribution must live on the nuisance space");
    }
  }
}

NuisanceRegion NuisanceSetProvider::SetFor(std::span<const double> x, Label y) const {
  if (kind == Kind::kFullSpace) return FullSpaceSet(space);
  return OracleQuantileSet(*this, x, y);
}

NuisanceRegion FullSpaceSet(const NuisanceSpace& space) {
  if (space.is_continuous()) {
    return NuisanceRegion::FromIntervals({{space.lo, space.hi}}, space);
  }
  std::vector<std::size_t> all(space.num_categories());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return NuisanceRegion::FromCategories(std::move(all), space);
}

NuisanceRegion OracleQuantileSet(const NuisanceSetProvider& provider,
                                 std::span<const double> /*x*/, Label y) {
  if (provider.kind != NuisanceSetProvider::Kind::kOracleQuantile) {
    throw ConfigError("oracle-quantile set requested from another provider kind");
  }
  provider.Validate();
  // The class-1 density does not depend on nu.
  if (y == Label::kOne) return FullSpaceSet(provider.space);
  const PriorSpec& dist = provider.distribution;
  const double g = provider.gamma;
  if (provider.space.is_continuous()) {
    double lo = dist.Quantile(0.5 * g);
    double hi = dist.Quantile(1.0 - 0.5 * g);
    if (g == 0.0 && dist.kind == PriorSpec::Kind::kPointMass) lo = hi = dist.point;
    lo = std::max(lo, provider.space.lo);
    hi = std::min(hi, provider.space.hi);
    const double scale = provider.space.hi - provider.space.lo;
    if (dist.kind != PriorSpec::Kind::kPointMass &&
        !(hi - lo > kMinRelativeWidth * scale)) {
      throw NumericError("oracle nuisance set degenerates at gamma = " +
                         FormatShort(g) + ": [" + FormatShort(lo) + ", " +
                         FormatShort(hi) + "]");
    }
    return NuisanceRegion::FromIntervals({{lo, hi}}, provider.space);
  }
  // Discrete: categories whose probability mass meets the central range.
  std::vector<std::size_t> cats;
  double below = 0.0;
  for (std::size_t k = 0; k < provider.space.num_categories(); ++k) {
    const double w = dist.Density(static_cast<double>(k));
    const double above = below + w;
    if (w > 0.0 && above > 0.5 * g && below < 1.0 - 0.5 * g) cats.push_back(k);
    below = above;
  }
  if (cats.empty()) {
    throw NumericError("oracle nuisance set is empty at gamma = " + FormatShort(g));
  }
  return NuisanceRegion::FromCategories(std::move(cats), provider.space);
}

std::vector<CoverageRow> ValidateCoverage(const NuisanceSetProvider& provider,
                                          const GenerativeConfig& simulator,
                                          Label y, std::span<const double> nu_grid,
                                          std::size_t n_per_point,
                                          std::uint64_t seed, int threads) {
  if (n_per_point < 100) {
    throw ConfigError("coverage validation needs at least 100 draws per point");
  }
  provider.Validate();
  simulator.Validate();
  const std::size_t dim =
      simulator.scenario == Scenario::kDiscreteToy ? kToyDims : 1;
  std::vector<CoverageRow> rows;
  rows.reserve(nu_grid.size());
  for (std::size_t g = 0; g < nu_grid.size(); ++g) {
    const double nu = nu_grid[g];
    if (!simulator.space().Contains(nu)) {
      throw DomainError("coverage grid nu = " + FormatShort(nu) +
                        " outside the nuisance space");
    }
    std::vector<std::uint8_t> hit(n_per_point, 0);
    const std::uint32_t stream =
        SubStream(Stream::kNuisanceCheck, static_cast<std::uint32_t>(g));
    ParallelFor(n_per_point, threads, [&](std::size_t i) {
      SampleRng rng(seed, stream, i);
      std::vector<double> x(dim);
      DrawObservation(simulator, y, nu, rng, x.data());
      hit[i] = provider.SetFor(x, y).Contains(nu);
    });
    CoverageRow row;
    row.nu = nu;
    row.n = n_per_point;
    row.covered = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    Tally(row, provider.gamma);
    rows.push_back(row);
  }
  return rows;
}

CoverageRow ValidateMarginalCoverage(const NuisanceSetProvider& provider,
                                     const GenerativeConfig& simulator, Label y,
                                     const PriorSpec& nu_distribution,
                                     std::size_t n, std::uint64_t seed,
                                     int threads) {
  if (n < 100) throw ConfigError("coverage validation needs at least 100 draws");
  provider.Validate();
  simulator.Validate();
  nu_distribution.Validate();
  const std::size_t dim =
      simulator.scenario == Scenario::kDiscreteToy ? kToyDims : 1;
  std::vector<std::uint8_t> hit(n, 0);
  const std::uint32_t stream = SubStream(Stream::kNuisanceCheck, 0xffffu);
  ParallelFor(n, threads, [&](std::size_t i) {
    SampleRng rng(seed, stream, i);
    const double nu = nu_distribution.Quantile(rng.Uniform());
    std::vector<double> x(dim);
    DrawObservation(simulator, y, nu, rng, x.data());
    hit[i] = provider.SetFor(x, y).Contains(nu);
  });
  CoverageRow row;
  row.nu = nu_distribution.Mean();
  row.n = n;
  row.covered = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  Tally(row, provider.gamma);
  return row;
}

}  // namespace naps
