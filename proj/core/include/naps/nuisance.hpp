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

#ifndef NAPS_NUISANCE_HPP_
#define NAPS_NUISANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "naps/genmodel.hpp"

namespace naps {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// A subset of the nuisance space: sorted disjoint closed intervals for a
// continuous space, a sorted category list for a discrete one.
struct NuisanceRegion {
  bool continuous = true;
  std::vector<Interval> intervals;
  std::vector<std::size_t> categories;
  bool flagged_empty = false;

  static NuisanceRegion FromIntervals(std::vector<Interval> intervals,
                                      const NuisanceSpace& space);
  static NuisanceRegion FromCategories(std::vector<std::size_t> categories,
                                       const NuisanceSpace& space);
  static NuisanceRegion Empty(const NuisanceSpace& space);

  bool empty() const;
  bool Contains(double nu) const;
  // Does [lo, hi] (or category lo when discrete) meet the region?
  bool Intersects(double lo, double hi) const;
  // Total length, or number of categories.
  double Width() const;

  friend bool operator==(const NuisanceRegion&, const NuisanceRegion&) = default;
};

struct NuisanceSetProvider {
  enum class Kind { kFullSpace, kOracleQuantile };

  Kind kind = Kind::kFullSpace;
  double gamma = 0.0;
  PriorSpec distribution;  // oracle kind only
  NuisanceSpace space;

  static NuisanceSetProvider FullSpace(NuisanceSpace space);
  static NuisanceSetProvider OracleQuantile(PriorSpec distribution, double gamma);

  void Validate() const;
  // S_y(x; gamma). Class 1 always receives the full space.
  NuisanceRegion SetFor(std::span<const double> x, Label y) const;
  NuisanceRegion SetFor(double x, Label y) const {
    return SetFor(std::span<const double>(&x, 1), y);
  }

  friend bool operator==(const NuisanceSetProvider&, const NuisanceSetProvider&) = default;
};

NuisanceRegion FullSpaceSet(const NuisanceSpace& space);
NuisanceRegion OracleQuantileSet(const NuisanceSetProvider& provider,
                                 std::span<const double> x, Label y);

struct CoverageRow {
  double nu = 0.0;
  std::size_t n = 0;
  std::size_t covered = 0;
  double coverage = 0.0;
  double standard_error = 0.0;  // sqrt(gamma (1 - gamma) / n)
  bool flagged = false;         // coverage < 1 - gamma - 3 se
};

// Per-nu coverage of S_y(X; gamma) with X drawn from p(x | y, nu).
std::vector<CoverageRow> ValidateCoverage(const NuisanceSetProvider& provider,
                                          const GenerativeConfig& simulator,
                                          Label y, std::span<const double> nu_grid,
                                          std::size_t n_per_point,
                                          std::uint64_t seed, int threads = 1);

// Coverage with nu itself drawn from `nu_distribution`.
CoverageRow ValidateMarginalCoverage(const NuisanceSetProvider& provider,
                                     const GenerativeConfig& simulator, Label y,
                                     const PriorSpec& nu_distribution,
                                     std::size_t n, std::uint64_t seed,
                                     int threads = 1);

}  // namespace naps

#endif  // NAPS_NUISANCE_HPP_
