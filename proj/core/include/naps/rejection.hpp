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

#ifndef NAPS_REJECTION_HPP_
#define NAPS_REJECTION_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "naps/genmodel.hpp"

namespace naps {

// One row of the augmented calibration sample: Z = 1 iff statistic <= cutoff.
struct AugmentedRecord {
  Label y = Label::kZero;
  double nu = 0.0;
  double cutoff = 0.0;
  std::uint8_t z = 0;
};

// Strictly increasing cutoffs on the statistic scale, K >= 2.
struct CutoffGrid {
  std::vector<double> values;

  static CutoffGrid FromValues(std::vector<double> values);
  std::size_t size() const { return values.size(); }

  friend bool operator==(const CutoffGrid&, const CutoffGrid&) = default;
};

// Partition of the nuisance space into cells: equal-width or explicit edges
// for a continuous space, one cell per category for a discrete one.
class NuBinning {
 public:
  static NuBinning EqualWidth(double lo, double hi, int bins);
  static NuBinning FromEdges(std::vector<double> edges);
  static NuBinning Categorical(std::size_t categories);
  // 20 equal-width bins (continuous) or one bin per category (discrete).
  static NuBinning Default(const NuisanceSpace& space, int bins = 20);

  bool is_categorical() const { return categorical_; }
  std::size_t num_bins() const {
    return categorical_ ? categories_ : edges_.size() - 1;
  }
  const std::vector<double>& edges() const { return edges_; }

  // Throws DomainError when nu lies outside the binned support.
  std::size_t BinOf(double nu) const;
  // Bin center, or the category index.
  double Representative(std::size_t bin) const;
  // [lo, hi] of a continuous bin; {k, k} for category k.
  std::pair<double, double> Range(std::size_t bin) const;

  friend bool operator==(const NuBinning&, const NuBinning&) = default;

 private:
  bool categorical_ = false;
  std::size_t categories_ = 0;
  std::vector<double> edges_;
};

// Weighted least-squares isotonic (nondecreasing) regression by
// pool-adjacent-violators.
std::vector<double> PoolAdjacentViolators(std::span<const double> values,
                                          std::span<const double> weights);

struct SurfaceCell {
  std::vector<double> fitted;  // one value per grid cutoff
  std::size_t count = 0;       // calibration samples in the cell

  friend bool operator==(const SurfaceCell&, const SurfaceCell&) = default;
};

struct FitMetadata {
  std::size_t calibration_size = 0;
  std::size_t grid_size = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const FitMetadata&, const FitMetadata&) = default;
};

// Estimated rejection probability W(C; y, nu) = P(lambda(X) <= C | y, nu) of
// the Bayes-factor statistic tau_{statistic}. Piecewise constant in nu (one
// cell per bin) and a right-continuous step function in C.
//
// Boundary conventions: W(C) = 0 below the first grid cutoff, the fitted
// maximum above the last one, and W(+inf) = 1.
class RejectionSurface {
 public:
  RejectionSurface() = default;
  RejectionSurface(Label statistic, NuBinning binning, CutoffGrid grid,
                   std::array<std::vector<SurfaceCell>, 2> cells,
                   FitMetadata meta);

  Label statistic() const { return statistic_; }
  const NuBinning& binning() const { return binning_; }
  const CutoffGrid& grid() const { return grid_; }
  const FitMetadata& meta() const { return meta_; }
  bool has_label(Label y) const { return !cells_[Index(y)].empty(); }
  const SurfaceCell& cell(Label y, std::size_t bin) const;

  double Eval(double cutoff, Label y, double nu) const;
  double EvalBin(double cutoff, Label y, std::size_t bin) const;

  // Generalized inverse: the smallest grid cutoff C with W(C; y, nu) >= beta.
  // beta <= 0 gives the first grid cutoff; beta == 1 falls back to +inf when
  // the fit never reaches 1. Any other unattainable beta throws
  // SaturationError carrying the attainable maximum.
  double Invert(double beta, Label y, double nu) const;
  double InvertBin(double beta, Label y, std::size_t bin) const;

  friend bool operator==(const RejectionSurface&, const RejectionSurface&) = default;

 private:
  Label statistic_ = Label::kZero;
  NuBinning binning_;
  CutoffGrid grid_;
  std::array<std::vector<SurfaceCell>, 2> cells_;
  FitMetadata meta_;
};

// Augmented calibration sample, B * K records. Failures of `statistic` are
// rethrown with the offending sample index.
using StatisticFn = std::function<double(std::span<const double>)>;
std::vector<AugmentedRecord> Augment(const Dataset& calibration,
                                     const StatisticFn& statistic,
                                     const CutoffGrid& grid);
std::vector<AugmentedRecord> Augment(const Dataset& calibration,
                                     std::span<const double> statistic_values,
                                     const CutoffGrid& grid);

// K mid-quantiles (levels (j - 0.5) / K, linear interpolation) of the
// statistic, de-duplicated. The seed is recorded only; the grid is
// deterministic.
CutoffGrid SampleCutoffGrid(std::span<const double> statistic_values,
                            std::size_t k, std::uint64_t seed = 0);

inline const std::vector<Label> kBothLabels = {Label::kZero, Label::kOne};

// Isotonic fit of Z on C within every (label, nu-bin) cell of the augmented
// records. Throws BinningError naming the first empty cell.
RejectionSurface FitRejectionSurface(std::span<const AugmentedRecord> records,
                                     const CutoffGrid& grid,
                                     const NuBinning& binning, Label statistic,
                                     const std::vector<Label>& labels = kBothLabels,
                                     std::uint64_t seed = 0);

// Same estimator computed from per-cell sufficient statistics, without
// materializing the B * K augmented records.
RejectionSurface FitRejectionSurface(const Dataset& calibration,
                                     std::span<const double> statistic_values,
                                     const CutoffGrid& grid,
                                     const NuBinning& binning, Label statistic,
                                     const std::vector<Label>& labels = kBothLabels,
                                     std::uint64_t seed = 0);

// --- PIT diagnostics ---------------------------------------------------------

// Any rejection-probability function W(C; y, nu).
using RejectionFn = std::function<double(double, Label, double)>;

// Parameter-space bin {y} x [nu_lo, nu_hi): right-closed when `closed_right`.
struct ParamBin {
  Label y = Label::kZero;
  double nu_lo = 0.0;
  double nu_hi = 0.0;
  bool closed_right = false;

  bool Contains(Label label, double nu) const {
    return label == y && nu >= nu_lo && (nu < nu_hi || (closed_right && nu == nu_hi));
  }
};

// Labels x {lower half, upper half} of a continuous space, or labels x
// categories of a discrete one.
std::vector<ParamBin> DefaultParamBins(const NuisanceSpace& space);

inline constexpr int kPitGridPoints = 100;

struct PitBinResult {
  ParamBin bin;
  std::size_t count = 0;
  std::vector<double> ecdf;  // at u = 1/100, ..., 100/100
  double ks_distance = 0.0;
  double threshold = 0.0;    // 1.36 / sqrt(count)
  bool pass = false;
  bool skipped = false;      // empty bin
};

struct PitReport {
  std::vector<double> pit;  // per sample
  std::vector<PitBinResult> bins;
  std::size_t unassigned = 0;
};

PitReport PitDiagnostics(const RejectionFn& rejection, const Dataset& eval,
                         std::span<const double> statistic_values,
                         std::span<const ParamBin> bins);
PitReport PitDiagnostics(const RejectionSurface& surface, const Dataset& eval,
                         std::span<const double> statistic_values,
                         std::span<const ParamBin> bins);

}  // namespace naps

#endif  // NAPS_REJECTION_HPP_
