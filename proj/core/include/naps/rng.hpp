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

#ifndef NAPS_RNG_HPP_
#define NAPS_RNG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace naps {

// Philox4x32-10 counter-based block generator (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter Philox4x32(PhiloxCounter counter, PhiloxKey key);

// Named stream identifiers. Each sample draws from its own substream keyed by
// (seed, stream, sample index), so results never depend on how work is split
// between threads.
enum class Stream : std::uint32_t {
  kCalibration = 1,
  kEvaluation = 2,
  kTrain = 3,
  kTarget = 4,
  kNuisanceCheck = 5,
  kCoverageCells = 6,
  kGammaSweep = 7,
  kPit = 8,
};

// Deterministic uniform source for a single sample. Every call to Uniform()
// consumes half of a Philox block.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double Uniform();

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  int used_ = 2;
};

inline std::uint32_t StreamId(Stream s) { return static_cast<std::uint32_t>(s); }

// Derives a sub-stream id from a base stream and a small tag (cell index, ...).
std::uint32_t SubStream(Stream base, std::uint32_t tag);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; callers write results to preallocated slots.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

// Number of workers to use when a configuration leaves it unspecified.
int DefaultThreads();

}  // namespace naps

#endif  // NAPS_RNG_HPP_
