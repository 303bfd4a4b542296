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

#include "naps/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "naps/error.hpp"

namespace naps {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string ExpectedHeader(Scenario scenario) {
  if (scenario == Scenario::kAnalyticExponential) return "y,nu,x";
  std::string h = "y,protocol";
  for (int d = 1; d <= kToyDims; ++d) h += ",x" + std::to_string(d);
  return h;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

std::string FormatShort(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

double ParseDouble(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(begin, end, v);
  if (result.ec != std::errc() || result.ptr != end) {
    throw ConfigError("cannot parse number '" + text + "'");
  }
  return v;
}

void WriteDatasetCsv(std::ostream& out, const Dataset& data,
                     const NuisanceSpace& space) {
  out << ExpectedHeader(data.scenario) << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << Index(data.y[i]) << ',';
    if (data.scenario == Scenario::kAnalyticExponential) {
      out << FormatDouble(data.nu[i]) << ',' << FormatDouble(data.x1(i));
    } else {
      out << space.categories.at(static_cast<std::size_t>(data.nu[i]));
      for (double c : data.observation(i)) {
        out << ',' << static_cast<long long>(c);
      }
    }
    out << '\n';
  }
}

Dataset ReadDatasetCsv(std::istream& in, const NuisanceSpace& space) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Dataset data;
  if (line == ExpectedHeader(Scenario::kAnalyticExponential)) {
    data.scenario = Scenario::kAnalyticExponential;
    data.x_dim = 1;
  } else if (line == ExpectedHeader(Scenario::kDiscreteToy)) {
    data.scenario = Scenario::kDiscreteToy;
    data.x_dim = kToyDims;
  } else {
    throw ConfigError("unrecognized dataset header '" + line + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != 2 + data.x_dim) {
      throw ConfigError("dataset line " + std::to_string(line_no) +
                        ": expected " + std::to_string(2 + data.x_dim) +
                        " fields");
    }
    data.y.push_back(LabelFromInt(static_cast<int>(ParseDouble(fields[0]))));
    if (data.scenario == Scenario::kAnalyticExponential) {
      data.nu.push_back(ParseDouble(fields[1]));
    } else {
      const auto it = std::find(space.categories.begin(), space.categories.end(),
                                fields[1]);
      if (it == space.categories.end()) {
        throw ConfigError("dataset line " + std::to_string(line_no) +
                          ": unknown protocol '" + fields[1] + "'");
      }
      data.nu.push_back(static_cast<double>(it - space.categories.begin()));
    }
    for (std::size_t d = 0; d < data.x_dim; ++d) {
      data.x.push_back(ParseDouble(fields[2 + d]));
    }
  }
  return data;
}

void WriteDatasetFile(const std::string& path, const Dataset& data,
                      const NuisanceSpace& space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  WriteDatasetCsv(out, data, space);
}

Dataset ReadDatasetFile(const std::string& path, const NuisanceSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return ReadDatasetCsv(in, space);
}

}  // namespace naps
