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

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "naps/classifier.hpp"
#include "naps/error.hpp"
#include "naps/experiment.hpp"
#include "naps/rejection.hpp"
#include "naps/serialize.hpp"
#include "json.hpp"

namespace naps {
namespace {

using nlohmann::json;
const NuisanceSpace kSpace = NuisanceSpace::Continuous(1, 10);

RejectionSurface FittedSurface() {
  const auto d = SampleDataset(AnalyticConfig(), 4000, 12);
  const auto model = ClassifierModel::AnalyticMarginal(AnalyticConfig());
  const auto stat = ComputeStatistic(model, Label::kOne, d);
  const auto grid = SampleCutoffGrid(stat.values, 40);
  return FitRejectionSurface(d, stat.values, grid, NuBinning::EqualWidth(1, 10, 3),
                             Label::kOne, kBothLabels, 12);
}

TEST(SurfaceJson, RoundTripIsBitExact) {
  const auto s = FittedSurface();
  const auto text = SurfaceToJson(s);
  EXPECT_EQ(SurfaceFromJson(text), s);
  EXPECT_EQ(SurfaceToJson(SurfaceFromJson(text)), text);
  const auto doc = json::parse(text);
  EXPECT_EQ(doc.at("schema"), "naps-rejection-surface");
  EXPECT_EQ(doc.at("schema_version"), kSchemaVersion);
}

TEST(SurfaceJson, VersionAndShapeChecked) {
  auto doc = json::parse(SurfaceToJson(FittedSurface()));
  doc["schema_version"] = kSchemaVersion + 1;
  EXPECT_THROW(SurfaceFromJson(doc.dump()), ConfigError);
  EXPECT_THROW(SurfaceFromJson("{not json"), ConfigError);
  EXPECT_THROW(SurfaceFromJson(ClassifierToJson(
                   ClassifierModel::AnalyticMarginal(AnalyticConfig()))),
               ConfigError);
}

TEST(ClassifierJson, RoundTrips) {
  const auto analytic = ClassifierModel::AnalyticMarginal(AnalyticShiftedConfig(4.0, 0.1, 0.3));
  const auto back = ClassifierFromJson(ClassifierToJson(analytic));
  EXPECT_EQ(back.kind(), analytic.kind());
  EXPECT_EQ(back.train_config().prior_class0, analytic.train_config().prior_class0);
  EXPECT_EQ(back.Posterior1(0.37), analytic.Posterior1(0.37));

  const auto hist = FitHistogramClassifier(SampleDataset(AnalyticConfig(), 1000, 3), 7);
  const auto hback = ClassifierFromJson(ClassifierToJson(hist));
  EXPECT_EQ(hback.histogram(), hist.histogram());
}

TEST(RegionJson, RoundTrips) {
  const auto r = NuisanceRegion::FromIntervals({{1.0 + 1.0 / 3.0, 2.0}, {4.1, 9.999}}, kSpace);
  EXPECT_EQ(RegionFromJson(RegionToJson(r), kSpace), r);
  const auto e = NuisanceRegion::Empty(kSpace);
  EXPECT_EQ(RegionFromJson(RegionToJson(e), kSpace), e);
}

TEST(ConfigJson, RoundTripAndStrictKeys) {
  ExperimentConfig c;
  c.alphas = {0.05, 0.15};
  c.gamma = GammaRule::Parse("0.002");
  c.target_prior = PriorSpec::TruncatedGaussian(4.0, 0.1, kSpace);
  c.methods = {"naps", "standard"};
  c.seed = 987654321987ull;
  const auto text = ConfigToJson(c);
  EXPECT_EQ(ConfigToJson(ConfigFromJson(text)), text);

  auto doc = json::parse(text);
  doc["bogus_key"] = 1;
  try {
    ConfigFromJson(doc.dump());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
  }
}

TEST(ConfigJson, MissingKeysKeepDefaults) {
  const auto c = ConfigFromJson(R"({"seed": 5})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.nu_bins, ExperimentConfig{}.nu_bins);
  EXPECT_EQ(c.alphas, ExperimentConfig{}.alphas);
}

TEST(ConfigJson, InvalidValuesRejected) {
  EXPECT_THROW(ConfigFromJson(R"({"seed": "abc"})"), ConfigError);
  EXPECT_THROW(ConfigFromJson(R"({"alphas": [0.0]})").Validate(), ConfigError);
  EXPECT_THROW(ConfigFromJson(R"({"methods": ["nope"]})").Validate(), ConfigError);
}

TEST(ConfigJson, MissingFileNamesPath) {
  try {
    LoadExperimentConfig("/nonexistent/dir/cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/cfg.json"), std::string::npos);
  }
}

TEST(ReportJson, NonFiniteValuesEncoded) {
  ExperimentReport r;
  MethodResult m;
  m.method = "naps";
  m.alpha = 0.1;
  m.cutoff = {std::numeric_limits<double>::infinity(), 0.5};
  m.metrics.precision[0] = MakeRate(0, 0);
  r.results.push_back(m);
  const auto doc = json::parse(ReportToJson(r));
  EXPECT_EQ(doc.at("schema"), "naps-report");
  const auto dumped = doc.dump();
  EXPECT_NE(dumped.find("\"inf\""), std::string::npos);
  EXPECT_NE(dumped.find("null"), std::string::npos);
  std::ostringstream csv;
  WriteReportCsv(csv, r);
  EXPECT_EQ(csv.str().rfind("method,alpha,gamma,metric,y,bin,nu_lo,nu_hi,value,se,hits,total", 0),
            0u);
}

TEST(TextFiles, WriteThenRead) {
  const auto dir = std::filesystem::temp_directory_path() / "naps_serialize_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.txt").string();
  WriteTextFile(path, "hello\n");
  EXPECT_EQ(ReadTextFile(path), "hello\n");
  std::filesystem::remove_all(dir);
  EXPECT_THROW(ReadTextFile(path), ConfigError);
}

}  // namespace
}  // namespace naps
