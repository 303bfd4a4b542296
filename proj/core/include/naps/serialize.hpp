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

#ifndef NAPS_SERIALIZE_HPP_
#define NAPS_SERIALIZE_HPP_

#include <iosfwd>
#include <string>

#include "naps/classifier.hpp"
#include "naps/experiment.hpp"
#include "naps/nuisance.hpp"
#include "naps/rejection.hpp"

namespace naps {

// Every document carries "schema" and "schema_version" keys.
inline constexpr int kSchemaVersion = 1;

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& content);

std::string SurfaceToJson(const RejectionSurface& surface);
RejectionSurface SurfaceFromJson(const std::string& text);

std::string ClassifierToJson(const ClassifierModel& model);
ClassifierModel ClassifierFromJson(const std::string& text);

std::string RegionToJson(const NuisanceRegion& region);
NuisanceRegion RegionFromJson(const std::string& text, const NuisanceSpace& space);

// Unknown keys are rejected; missing keys keep their defaults.
std::string ConfigToJson(const ExperimentConfig& config);
ExperimentConfig ConfigFromJson(const std::string& text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

std::string ReportToJson(const ExperimentReport& report);
// Long format: method,alpha,gamma,metric,y,bin,nu_lo,nu_hi,value,se,hits,total
void WriteReportCsv(std::ostream& out, const ExperimentReport& report);

std::string GammaSweepToJson(const GammaSweepReport& report);
void WriteGammaSweepCsv(std::ostream& out, const GammaSweepReport& report);

std::string InvarianceToJson(const InvarianceReport& report);
std::string DiagnoseToJson(const DiagnoseReport& report);
void WriteDiagnoseCsv(std::ostream& out, const DiagnoseReport& report);

}  // namespace naps

#endif  // NAPS_SERIALIZE_HPP_
