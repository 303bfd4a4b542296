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

#include "naps/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {
namespace {

std::string CellName(Label y, const NuBinning& binning, std::size_t bin) {
  const auto [lo, hi] = binning.Range(bin);
  std::string name = "(y=" + std::to_string(Index(y)) + ", bin " +
                     std::to_string(bin);
  if (binning.is_categorical()) {
    name += " category " + std::to_string(bin);
  } else {
    name += " nu in [" + FormatShort(lo) + ", " + FormatShort(hi) + "]";
  }
  return name + ")";
}

// Per (label, bin, grid point) running sums of Z and record counts.
struct CellAccumulator {
  std::vector<double> sum_z;
  std::vector<double> count;
};

std::vector<double> FitCell(const CellAccumulator& acc) {
  const std::size_t k = acc.sum_z.size();
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<std::size_t> index;
  for (std::size_t j = 0; j < k; ++j) {
    if (acc.count[j] > 0) {
      values.push_back(acc.sum_z[j] / acc.count[j]);
      weights.push_back(acc.count[j]);
      index.push_back(j);
    }
  }
  const auto pooled = PoolAdjacentViolators(values, weights);
  std::vector<double> fitted(k, 0.0);
  std::size_t next = 0;
  for (std::size_t j = 0; j < k; ++j) {
    while (next + 1 < index.size() && index[next + 1] <= j) ++next;
    // Grid points without records inherit the nearest fitted value at or
    // before them (or the first one when none precede).
    fitted[j] = std::clamp(pooled[next], 0.0, 1.0);
  }
  return fitted;
}

RejectionSurface BuildSurface(
    const std::array<std::vector<CellAccumulator>, 2>& acc,
    const std::array<std::vector<std::size_t>, 2>& sample_counts,
    const CutoffGrid& grid, const NuBinning& binning, Label statistic,
    const std::vector<Label>& labels, std::size_t calibration_size,
    std::uint64_t seed) {
  std::array<std::vector<SurfaceCell>, 2> cells;
  for (Label y : labels) {
    auto& out = cells[Index(y)];
    out.resize(binning.num_bins());
    for (std::size_t b = 0; b < binning.num_bins(); ++b) {
      if (sample_counts[Index(y)][b] == 0) {
        throw BinningError("empty rejection-surface cell " +
                           CellName(y, binning, b));
      }
      out[b].fitted = FitCell(acc[Index(y)][b]);
      out[b].count = sample_counts[Index(y)][b];
    }
  }
  FitMetadata meta{calibration_size, grid.size(), seed};
  return RejectionSurface(statistic, binning, grid, std::move(cells), meta);
}

std::array<std::vector<CellAccumulator>, 2> MakeAccumulators(
    std::size_t bins, std::size_t k) {
  std::array<std::vector<CellAccumulator>, 2> acc;
  for (auto& per_label : acc) {
    per_label.assign(bins, CellAccumulator{std::vector<double>(k, 0.0),
                                           std::vector<double>(k, 0.0)});
  }
  return acc;
}

double QuantileType7(const std::vector<double>& sorted, double level) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

// CutoffGrid ------------------------------------------------------------------

CutoffGrid CutoffGrid::FromValues(std::vector<double> values) {
  if (values.size() < 2) throw ConfigError("cutoff grid needs at least 2 points");
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]) || (j > 0 && !(values[j] > values[j - 1]))) {
      throw ConfigError("cutoff grid must be finite and strictly increasing");
    }
  }
  return CutoffGrid{std::move(values)};
}

// NuBinning -------------------------------------------------------------------

NuBinning NuBinning::EqualWidth(double lo, double hi, int bins) {
  if (bins < 1 || !(lo < hi)) {
    throw ConfigError("equal-width binning needs bins >= 1 and lo < hi");
  }
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) {
    edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  }
  edges.back() = hi;
  return FromEdges(std::move(edges));
}

NuBinning NuBinning::FromEdges(std::vector<double> edges) {
  if (edges.size() < 2) throw ConfigError("binning needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw ConfigError("bin edges must be strictly increasing");
    }
  }
  NuBinning b;
  b.edges_ = std::move(edges);
  return b;
}

NuBinning NuBinning::Categorical(std::size_t categories) {
  if (categories == 0) throw ConfigError("categorical binning needs a category");
  NuBinning b;
  b.categorical_ = true;
  b.categories_ = categories;
  return b;
}

NuBinning NuBinning::Default(const NuisanceSpace& space, int bins) {
  if (space.is_continuous()) return EqualWidth(space.lo, space.hi, bins);
  return Categorical(space.num_categories());
}

std::size_t NuBinning::BinOf(double nu) const {
  if (categorical_) {
    if (nu >= 0.0 && nu == std::floor(nu) &&
        nu < static_cast<double>(categories_)) {
      return static_cast<std::size_t>(nu);
    }
    throw DomainError("category index " + FormatShort(nu) +
                      " outside the binning");
  }
  if (!(nu >= edges_.front() && nu <= edges_.back())) {
    throw DomainError("nu = " + FormatShort(nu) + " outside the binned range [" +
                      FormatShort(edges_.front()) + ", " +
                      FormatShort(edges_.back()) + "]");
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), nu);
  const auto bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return std::min(bin, num_bins() - 1);
}

double NuBinning::Representative(std::size_t bin) const {
  if (categorical_) return static_cast<double>(bin);
  return 0.5 * (edges_[bin] + edges_[bin + 1]);
}

std::pair<double, double> NuBinning::Range(std::size_t bin) const {
  if (categorical_) return {static_cast<double>(bin), static_cast<double>(bin)};
  return {edges_[bin], edges_[bin + 1]};
}

// PAV -------------------------------------------------------------------------

std::vector<double> PoolAdjacentViolators(std::span<const double> values,
                                          std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw ConfigError("isotonic regression: values and weights differ in length");
  }
  struct Block {
    double weighted_sum;
    double weight;
    std::size_t length;
    double mean() const { return weighted_sum / weight; }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw ConfigError("isotonic regression weights must be positive");
    }
    blocks.push_back({values[i] * weights[i], weights[i], 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block top = blocks.back();
      blocks.pop_back();
      blocks.back().weighted_sum += top.weighted_sum;
      blocks.back().weight += top.weight;
      blocks.back().length += top.length;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(values.size());
  for (const Block& b : blocks) fitted.insert(fitted.end(), b.length, b.mean());
  return fitted;
}

// RejectionSurface ------------------------------------------------------------

RejectionSurface::RejectionSurface(Label statistic, NuBinning binning,
                                   CutoffGrid grid,
                                   std::array<std::vector<SurfaceCell>, 2> cells,
                                   FitMetadata meta)
    : statistic_(statistic),
      binning_(std::move(binning)),
      grid_(std::move(grid)),
      cells_(std::move(cells)),
      meta_(meta) {
  for (const auto& per_label : cells_) {
    if (per_label.empty()) continue;
    if (per_label.size() != binning_.num_bins()) {
      throw ConfigError("rejection surface needs one cell per bin");
    }
    for (const SurfaceCell& c : per_label) {
      if (c.fitted.size() != grid_.size()) {
        throw ConfigError("rejection surface cell size differs from the grid");
      }
      for (std::size_t j = 0; j < c.fitted.size(); ++j) {
        if (!(c.fitted[j] >= 0.0 && c.fitted[j] <= 1.0) ||
            (j > 0 && c.fitted[j] < c.fitted[j - 1])) {
          throw ConfigError("rejection surface cell is not monotone in [0, 1]");
        }
      }
    }
  }
}

const SurfaceCell& RejectionSurface::cell(Label y, std::size_t bin) const {
  const auto& per_label = cells_[Index(y)];
  if (per_label.empty()) {
    throw ConfigError("rejection surface has no cells for label " +
                      std::to_string(Index(y)));
  }
  if (bin >= per_label.size()) throw DomainError("bin index out of range");
  return per_label[bin];
}

double RejectionSurface::Eval(double cutoff, Label y, double nu) const {
  return EvalBin(cutoff, y, binning_.BinOf(nu));
}

double RejectionSurface::EvalBin(double cutoff, Label y, std::size_t bin) const {
  const SurfaceCell& c = cell(y, bin);
  if (cutoff == std::numeric_limits<double>::infinity()) return 1.0;
  const auto it = std::upper_bound(grid_.values.begin(), grid_.values.end(), cutoff);
  if (it == grid_.values.begin()) return 0.0;
  return c.fitted[static_cast<std::size_t>(it - grid_.values.begin()) - 1];
}

double RejectionSurface::Invert(double beta, Label y, double nu) const {
  return InvertBin(beta, y, binning_.BinOf(nu));
}

double RejectionSurface::InvertBin(double beta, Label y, std::size_t bin) const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw DomainError("rejection level beta = " + FormatShort(beta) +
                      " outside [0, 1]");
  }
  const SurfaceCell& c = cell(y, bin);
  const auto it = std::lower_bound(c.fitted.begin(), c.fitted.end(), beta);
  if (it == c.fitted.end()) {
    if (beta == 1.0) return std::numeric_limits<double>::infinity();
    throw SaturationError("rejection surface saturates below beta = " +
                              FormatShort(beta) + " in cell " +
                              CellName(y, binning_, bin) +
                              "; attainable maximum " +
                              FormatShort(c.fitted.back()),
                          c.fitted.back());
  }
  return grid_.values[static_cast<std::size_t>(it - c.fitted.begin())];
}

// Augmentation and fitting ----------------------------------------------------

std::vector<AugmentedRecord> Augment(const Dataset& calibration,
                                     const StatisticFn& statistic,
                                     const CutoffGrid& grid) {
  std::vector<double> values(calibration.size());
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    try {
      values[i] = statistic(calibration.observation(i));
    } catch (...) {
      RethrowWithStage("statistic evaluation, sample " + std::to_string(i));
    }
  }
  return Augment(calibration, values, grid);
}

std::vector<AugmentedRecord> Augment(const Dataset& calibration,
                                     std::span<const double> statistic_values,
                                     const CutoffGrid& grid) {
  if (calibration.empty()) throw ConfigError("calibration set is empty");
  if (statistic_values.size() != calibration.size()) {
    throw ConfigError("one statistic value per calibration sample is required");
  }
  std::vector<AugmentedRecord> records;
  records.reserve(calibration.size() * grid.size());
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    for (double c : grid.values) {
      records.push_back({calibration.y[i], calibration.nu[i], c,
                         static_cast<std::uint8_t>(statistic_values[i] <= c)});
    }
  }
  return records;
}

CutoffGrid SampleCutoffGrid(std::span<const double> statistic_values,
                            std::size_t k, std::uint64_t /*seed*/) {
  if (k < 2) throw ConfigError("cutoff grid size K must be at least 2");
  if (statistic_values.empty()) throw ConfigError("no statistic values for the grid");
  std::vector<double> sorted(statistic_values.begin(), statistic_values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw ConfigError("degenerate statistic: every value equals " +
                      FormatShort(sorted.front()));
  }
  std::vector<double> grid;
  grid.reserve(k);
  for (std::size_t j = 1; j <= k; ++j) {
    const double level = (static_cast<double>(j) - 0.5) / static_cast<double>(k);
    const double q = QuantileType7(sorted, level);
    if (grid.empty() || q > grid.back()) grid.push_back(q);
  }
  if (grid.size() < 2) {
    throw ConfigError("degenerate statistic: fewer than two distinct quantiles");
  }
  return CutoffGrid::FromValues(std::move(grid));
}

RejectionSurface FitRejectionSurface(std::span<const AugmentedRecord> records,
                                     const CutoffGrid& grid,
                                     const NuBinning& binning, Label statistic,
                                     const std::vector<Label>& labels,
                                     std::uint64_t seed) {
  auto acc = MakeAccumulators(binning.num_bins(), grid.size());
  std::array<std::vector<std::size_t>, 2> counts{
      std::vector<std::size_t>(binning.num_bins(), 0),
      std::vector<std::size_t>(binning.num_bins(), 0)};
  for (const AugmentedRecord& r : records) {
    const auto it = std::lower_bound(grid.values.begin(), grid.values.end(), r.cutoff);
    if (it == grid.values.end() || *it != r.cutoff) {
      throw ConfigError("augmented record cutoff " + FormatShort(r.cutoff) +
                        " is not a grid point");
    }
    const auto j = static_cast<std::size_t>(it - grid.values.begin());
    const std::size_t b = binning.BinOf(r.nu);
    CellAccumulator& cell = acc[Index(r.y)][b];
    cell.sum_z[j] += r.z;
    cell.count[j] += 1.0;
  }
  std::size_t total = 0;
  for (int y = 0; y < 2; ++y) {
    for (std::size_t b = 0; b < binning.num_bins(); ++b) {
      const auto& c = acc[y][b].count;
      counts[y][b] = static_cast<std::size_t>(*std::max_element(c.begin(), c.end()));
      total += counts[y][b];
    }
  }
  return BuildSurface(acc, counts, grid, binning, statistic, labels, total, seed);
}

RejectionSurface FitRejectionSurface(const Dataset& calibration,
                                     std::span<const double> statistic_values,
                                     const CutoffGrid& grid,
                                     const NuBinning& binning, Label statistic,
                                     const std::vector<Label>& labels,
                                     std::uint64_t seed) {
  if (calibration.empty()) throw ConfigError("calibration set is empty");
  if (statistic_values.size() != calibration.size()) {
    throw ConfigError("one statistic value per calibration sample is required");
  }
  const std::size_t k = grid.size();
  // first[y][b][j]: samples whose first grid cutoff >= statistic is j.
  std::array<std::vector<std::vector<double>>, 2> first;
  for (auto& per_label : first) {
    per_label.assign(binning.num_bins(), std::vector<double>(k + 1, 0.0));
  }
  std::array<std::vector<std::size_t>, 2> counts{
      std::vector<std::size_t>(binning.num_bins(), 0),
      std::vector<std::size_t>(binning.num_bins(), 0)};
  for (std::size_t i = 0; i < calibration.size(); ++i) {
    const std::size_t b = binning.BinOf(calibration.nu[i]);
    const auto it = std::lower_bound(grid.values.begin(), grid.values.end(),
                                     statistic_values[i]);
    first[Index(calibration.y[i])][b][static_cast<std::size_t>(it - grid.values.begin())] += 1.0;
    ++counts[Index(calibration.y[i])][b];
  }
  auto acc = MakeAccumulators(binning.num_bins(), k);
  for (int y = 0; y < 2; ++y) {
    for (std::size_t b = 0; b < binning.num_bins(); ++b) {
      double running = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        running += first[y][b][j];
        acc[y][b].sum_z[j] = running;
        acc[y][b].count[j] = static_cast<double>(counts[y][b]);
      }
    }
  }
  return BuildSurface(acc, counts, grid, binning, statistic, labels,
                      calibration.size(), seed);
}

// PIT -------------------------------------------------------------------------

std::vector<ParamBin> DefaultParamBins(const NuisanceSpace& space) {
  std::vector<ParamBin> bins;
  for (Label y : kLabels) {
    if (space.is_continuous()) {
      const double mid = 0.5 * (space.lo + space.hi);
      bins.push_back({y, space.lo, mid, false});
      bins.push_back({y, mid, space.hi, true});
    } else {
      for (std::size_t k = 0; k < space.num_categories(); ++k) {
        bins.push_back({y, static_cast<double>(k), static_cast<double>(k + 1), false});
      }
    }
  }
  return bins;
}

PitReport PitDiagnostics(const RejectionFn& rejection, const Dataset& eval,
                         std::span<const double> statistic_values,
                         std::span<const ParamBin> bins) {
  if (statistic_values.size() != eval.size()) {
    throw ConfigError("one statistic value per evaluation sample is required");
  }
  PitReport report;
  report.pit.resize(eval.size());
  std::vector<std::vector<double>> per_bin(bins.size());
  for (std::size_t i = 0; i < eval.size(); ++i) {
    const double pit = rejection(statistic_values[i], eval.y[i], eval.nu[i]);
    report.pit[i] = pit;
    bool assigned = false;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (bins[b].Contains(eval.y[i], eval.nu[i])) {
        per_bin[b].push_back(pit);
        assigned = true;
        break;
      }
    }
    if (!assigned) ++report.unassigned;
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    PitBinResult r;
    r.bin = bins[b];
    r.count = per_bin[b].size();
    if (r.count == 0) {
      r.skipped = true;
      report.bins.push_back(std::move(r));
      continue;
    }
    auto& v = per_bin[b];
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(r.count);
    r.ecdf.resize(kPitGridPoints);
    for (int k = 1; k <= kPitGridPoints; ++k) {
      const double u = static_cast<double>(k) / kPitGridPoints;
      const auto le = std::upper_bound(v.begin(), v.end(), u) - v.begin();
      r.ecdf[k - 1] = static_cast<double>(le) / n;
      r.ks_distance = std::max(r.ks_distance, std::abs(r.ecdf[k - 1] - u));
    }
    r.threshold = 1.36 / std::sqrt(n);
    r.pass = r.ks_distance <= r.threshold;
    report.bins.push_back(std::move(r));
  }
  return report;
}

PitReport PitDiagnostics(const RejectionSurface& surface, const Dataset& eval,
                         std::span<const double> statistic_values,
                         std::span<const ParamBin> bins) {
  return PitDiagnostics(
      [&surface](double c, Label y, double nu) { return surface.Eval(c, y, nu); },
      eval, statistic_values, bins);
}

}  // namespace naps
