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

#ifndef NAPS_METRICS_HPP_
#define NAPS_METRICS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "naps/genmodel.hpp"
#include "naps/predict.hpp"
#include "naps/rejection.hpp"

namespace naps {

// A binomial proportion with its Monte Carlo standard error.
struct Rate {
  std::size_t hits = 0;
  std::size_t total = 0;
  double value = 0.0;           // NaN when total == 0
  double standard_error = 0.0;  // sqrt(value (1 - value) / total)
};

Rate MakeRate(std::size_t hits, std::size_t total);

enum class SetKind { kEmpty = 0, kOnly0 = 1, kOnly1 = 2, kBoth = 3 };
SetKind KindOf(const PredictionSet& set);
inline constexpr int kSetKinds = 4;

struct CellCoverage {
  Label y = Label::kZero;
  std::size_t bin = 0;
  double nu_lo = 0.0;
  double nu_hi = 0.0;
  Rate coverage;
};

struct MetricsTable {
  std::size_t n = 0;
  // counts[y][kind]: true label by set kind; sums to n.
  std::array<std::array<std::size_t, kSetKinds>, 2> counts{};
  Rate marginal_coverage;
  std::array<Rate, 2> coverage_given_y;
  std::vector<CellCoverage> coverage_given_y_bin;
  std::array<Rate, 2> power;   // P(1 - y not in set | Y = y)
  Rate marginal_power;         // P(1 - Y not in set)
  std::array<Rate, 2> precision;  // P(Y = y | set = {y})
  Rate ambiguity;
  Rate empty;
  double mean_size = 0.0;
  double mean_size_se = 0.0;
};

MetricsTable ComputeMetrics(const Dataset& data, std::span<const PredictionSet> sets,
                            const NuBinning& binning);

}  // namespace naps

#endif  // NAPS_METRICS_HPP_
