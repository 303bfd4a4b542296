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

#include <array>
#include <vector>

#include "benchmark/benchmark.h"
#include "naps/classifier.hpp"
#include "naps/genmodel.hpp"
#include "naps/nuisance.hpp"
#include "naps/predict.hpp"
#include "naps/rejection.hpp"

namespace naps {
namespace {

const ClassifierModel& Model() {
  static const ClassifierModel m = ClassifierModel::AnalyticMarginal(AnalyticConfig());
  return m;
}

void BM_AnalyticPosterior(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += 0.001;
    if (x > 1.0) x = 0.0;
    benchmark::DoNotOptimize(Model().Posterior1(x));
  }
}
BENCHMARK(BM_AnalyticPosterior);

void BM_SampleDataset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SampleDataset(AnalyticConfig(), n, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDataset)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PoolAdjacentViolators(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> v(n);
  std::vector<double> w(n, 1.0);
  SampleRng rng(1, 1, 0);
  for (auto& x : v) x = rng.Uniform();
  for (auto _ : state) benchmark::DoNotOptimize(PoolAdjacentViolators(v, w));
}
BENCHMARK(BM_PoolAdjacentViolators)->Arg(200)->Arg(2000);

// Surface fit from sufficient statistics; posterior precomputed.
void BM_FitSurface(benchmark::State& state) {
  const auto d = SampleDataset(AnalyticConfig(), 100000, 2);
  const auto stat = ComputeStatistic(Model(), Label::kZero, d);
  const auto grid = SampleCutoffGrid(stat.values, static_cast<std::size_t>(state.range(0)));
  const auto bins = NuBinning::EqualWidth(1, 10, 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        FitRejectionSurface(d, stat.values, grid, bins, Label::kZero));
  }
}
BENCHMARK(BM_FitSurface)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_NapsPredict(benchmark::State& state) {
  const auto d = SampleDataset(AnalyticConfig(), 50000, 3);
  const auto p1 = Posterior1Batch(Model(), d);
  const auto bins = NuBinning::EqualWidth(1, 10, 20);
  std::array<RejectionSurface, 2> surfaces;
  for (Label y : kLabels) {
    const auto stat = StatisticFromPosteriors(Model(), y, p1);
    const auto grid = SampleCutoffGrid(stat.values, 200);
    surfaces[Index(y)] = FitRejectionSurface(d, stat.values, grid, bins, y);
  }
  const NapsPredictor naps(Model(), {&surfaces[0], &surfaces[1]},
                           NuisanceSetProvider::FullSpace(NuisanceSpace::Continuous(1, 10)),
                           0.05, 0.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(naps.Predict(d.observation(i), p1[i]));
    i = (i + 1) % d.size();
  }
}
BENCHMARK(BM_NapsPredict);

}  // namespace
}  // namespace naps

// The packaged benchmark_main archive carries LTO objects from another
// compiler release, so the entry point lives here.
BENCHMARK_MAIN();
