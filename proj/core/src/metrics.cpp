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

#include "naps/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <limits>

#include "naps/error.hpp"

namespace naps {

Rate MakeRate(std::size_t hits, std::size_t total) {
  Rate r;
  r.hits = hits;
  r.total = total;
  if (total == 0) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.standard_error = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double n = static_cast<double>(total);
  r.value = static_cast<double>(hits) / n;
  r.standard_error = std::sqrt(r.value * (1.0 - r.value) / n);
  return r;
}

SetKind KindOf(const PredictionSet& set) {
  if (set.member[0] && set.member[1]) return SetKind::kBoth;
  if (set.member[0]) return SetKind::kOnly0;
  if (set.member[1]) return SetKind::kOnly1;
  return SetKind::kEmpty;
}

MetricsTable ComputeMetrics(const Dataset& data, std::span<const PredictionSet> sets,
                            const NuBinning& binning) {
  if (sets.size() != data.size()) {
    throw ConfigError("one prediction set per evaluation sample is required");
  }
  MetricsTable m;
  m.n = data.size();
  const std::size_t bins = binning.num_bins();
  std::array<std::vector<std::size_t>, 2> cell_hits{std::vector<std::size_t>(bins, 0),
                                                    std::vector<std::size_t>(bins, 0)};
  std::array<std::vector<std::size_t>, 2> cell_total = cell_hits;
  double size_sum = 0.0;
  double size_sq = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const int y = Index(data.y[i]);
    const SetKind kind = KindOf(sets[i]);
    ++m.counts[y][static_cast<int>(kind)];
    const std::size_t b = binning.BinOf(data.nu[i]);
    ++cell_total[y][b];
    if (sets[i].member[y]) ++cell_hits[y][b];
    const double size = sets[i].size();
    size_sum += size;
    size_sq += size * size;
  }

  auto count = [&](int y, SetKind k) { return m.counts[y][static_cast<int>(k)]; };
  std::size_t covered_total = 0;
  std::size_t power_total = 0;
  std::size_t both = 0;
  std::size_t none = 0;
  for (int y = 0; y < 2; ++y) {
    const std::size_t total = count(y, SetKind::kEmpty) + count(y, SetKind::kOnly0) +
                              count(y, SetKind::kOnly1) + count(y, SetKind::kBoth);
    const SetKind own = y == 0 ? SetKind::kOnly0 : SetKind::kOnly1;
    const std::size_t covered = count(y, own) + count(y, SetKind::kBoth);
    // 1 - y is excluded exactly when the set is {y} or empty.
    const std::size_t excluded_other = count(y, own) + count(y, SetKind::kEmpty);
    m.coverage_given_y[y] = MakeRate(covered, total);
    m.power[y] = MakeRate(excluded_other, total);
    m.precision[y] = MakeRate(count(y, own), count(y, own) + count(1 - y, own));
    covered_total += covered;
    power_total += excluded_other;
    both += count(y, SetKind::kBoth);
    none += count(y, SetKind::kEmpty);
  }
  m.marginal_coverage = MakeRate(covered_total, m.n);
  m.marginal_power = MakeRate(power_total, m.n);
  m.ambiguity = MakeRate(both, m.n);
  m.empty = MakeRate(none, m.n);
  if (m.n > 0) {
    const double n = static_cast<double>(m.n);
    m.mean_size = size_sum / n;
    const double var = std::max(0.0, size_sq / n - m.mean_size * m.mean_size);
    m.mean_size_se = std::sqrt(var / n);
  }
  for (Label y : kLabels) {
    for (std::size_t b = 0; b < bins; ++b) {
      CellCoverage c;
      c.y = y;
      c.bin = b;
      std::tie(c.nu_lo, c.nu_hi) = binning.Range(b);
      c.coverage = MakeRate(cell_hits[Index(y)][b], cell_total[Index(y)][b]);
      m.coverage_given_y_bin.push_back(c);
    }
  }
  return m;
}

}  // namespace naps
