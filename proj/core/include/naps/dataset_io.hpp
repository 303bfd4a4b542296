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

#ifndef NAPS_DATASET_IO_HPP_
#define NAPS_DATASET_IO_HPP_

#include <iosfwd>
#include <string>

#include "naps/genmodel.hpp"

namespace naps {

// Decimal text with 17 significant digits; parses back to the same double.
// 17 significant digits.
std::string FormatDouble(double v);
// Shortest text that reads back to the same double.
std::string FormatShort(double v);
double ParseDouble(const std::string& text);

// Delimited text: header `y,nu,x` (analytic) or `y,protocol,x1,...,x8`
// (discrete toy, protocol written as its category identifier).
void WriteDatasetCsv(std::ostream& out, const Dataset& data,
                     const NuisanceSpace& space);
Dataset ReadDatasetCsv(std::istream& in, const NuisanceSpace& space);

void WriteDatasetFile(const std::string& path, const Dataset& data,
                      const NuisanceSpace& space);
Dataset ReadDatasetFile(const std::string& path, const NuisanceSpace& space);

}  // namespace naps

#endif  // NAPS_DATASET_IO_HPP_
