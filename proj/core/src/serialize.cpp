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

#include "naps/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "naps/dataset_io.hpp"
#include "naps/error.hpp"

namespace naps {

using nlohmann::json;

namespace {

json Num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double GetNum(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

json Parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("malformed " + what + " JSON: " + e.what());
  }
}

void RequireSchema(const json& j, const std::string& schema) {
  if (!j.is_object() || j.value("schema", std::string()) != schema) {
    throw ConfigError("expected a '" + schema + "' document");
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw ConfigError("unsupported " + schema + " schema_version");
  }
}

json Header(const std::string& schema) {
  json j = json::object();
  j["schema"] = schema;
  j["schema_version"] = kSchemaVersion;
  return j;
}

const json& At(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "'");
  return j.at(key);
}

std::string ScenarioName(Scenario s) {
  return s == Scenario::kAnalyticExponential ? "analytic" : "discrete-toy";
}

Scenario ScenarioFromName(const std::string& s) {
  if (s == "analytic") return Scenario::kAnalyticExponential;
  if (s == "discrete-toy") return Scenario::kDiscreteToy;
  throw ConfigError("unknown scenario '" + s + "'");
}

json SpaceToJson(const NuisanceSpace& space) {
  json j;
  if (space.is_continuous()) {
    j["lo"] = space.lo;
    j["hi"] = space.hi;
  } else {
    j["categories"] = space.categories;
  }
  return j;
}

NuisanceSpace SpaceFromJson(const json& j) {
  if (j.contains("categories")) {
    return NuisanceSpace::Discrete(j.at("categories").get<std::vector<std::string>>());
  }
  return NuisanceSpace::Continuous(GetNum(At(j, "lo")), GetNum(At(j, "hi")));
}

json PriorToJson(const PriorSpec& p) {
  json j = SpaceToJson(p.support);
  switch (p.kind) {
    case PriorSpec::Kind::kUniform:
      j["kind"] = "uniform";
      break;
    case PriorSpec::Kind::kTruncatedGaussian:
      j["kind"] = "truncated-gaussian";
      j["mean"] = p.mean;
      j["sd"] = p.sd;
      break;
    case PriorSpec::Kind::kDiscreteWeights:
      j["kind"] = "discrete";
      j["weights"] = p.weights;
      break;
    case PriorSpec::Kind::kPointMass:
      j["kind"] = "point-mass";
      j["point"] = p.point;
      break;
  }
  return j;
}

PriorSpec PriorFromJson(const json& j) {
  static const std::set<std::string> kKeys = {"kind", "lo", "hi", "categories",
                                              "mean", "sd", "weights", "point"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown prior key '" + key + "'");
  }
  const std::string kind = At(j, "kind").get<std::string>();
  PriorSpec p;
  if (kind == "uniform") {
    p = PriorSpec::Uniform(SpaceFromJson(j));
  } else if (kind == "truncated-gaussian") {
    p = PriorSpec::TruncatedGaussian(GetNum(At(j, "mean")), GetNum(At(j, "sd")),
                                     SpaceFromJson(j));
  } else if (kind == "discrete") {
    p = PriorSpec::DiscreteWeights(At(j, "weights").get<std::vector<double>>(),
                                   SpaceFromJson(j));
  } else if (kind == "point-mass") {
    p = PriorSpec::PointMass(GetNum(At(j, "point")), SpaceFromJson(j));
  } else {
    throw ConfigError("unknown prior kind '" + kind + "'");
  }
  p.Validate();
  return p;
}

json GenerativeToJson(const GenerativeConfig& g) {
  json j;
  j["scenario"] = ScenarioName(g.scenario);
  j["class1_probability"] = g.class1_probability;
  j["prior_class0"] = PriorToJson(g.prior_class0);
  j["prior_class1"] = PriorToJson(g.prior_class1);
  j["class0_rate_multiplier"] = g.class0_rate_multiplier;
  if (g.scenario == Scenario::kDiscreteToy) j["toy_rates"] = g.toy_rates;
  return j;
}

GenerativeConfig GenerativeFromJson(const json& j) {
  GenerativeConfig g;
  g.scenario = ScenarioFromName(At(j, "scenario").get<std::string>());
  g.class1_probability = GetNum(At(j, "class1_probability"));
  g.prior_class0 = PriorFromJson(At(j, "prior_class0"));
  g.prior_class1 = PriorFromJson(At(j, "prior_class1"));
  g.class0_rate_multiplier = GetNum(At(j, "class0_rate_multiplier"));
  if (j.contains("toy_rates")) g.toy_rates = j.at("toy_rates").get<ToyRates>();
  g.Validate();
  return g;
}

json RateToJson(const Rate& r) {
  return json{{"value", Num(r.value)},
              {"se", Num(r.standard_error)},
              {"hits", r.hits},
              {"total", r.total}};
}

json BinToJson(const ParamBin& b) {
  return json{{"y", Index(b.y)},
              {"nu_lo", b.nu_lo},
              {"nu_hi", b.nu_hi},
              {"closed_right", b.closed_right}};
}

json PitToJson(const PitReport& r) {
  json bins = json::array();
  for (const PitBinResult& b : r.bins) {
    json e = BinToJson(b.bin);
    e["count"] = b.count;
    e["skipped"] = b.skipped;
    e["ks_distance"] = b.ks_distance;
    e["threshold"] = Num(b.threshold);
    e["pass"] = b.pass;
    json ecdf = json::array();
    for (double v : b.ecdf) ecdf.push_back(v);
    e["ecdf"] = ecdf;
    bins.push_back(e);
  }
  return json{{"bins", bins}, {"unassigned", r.unassigned}};
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// Files -----------------------------------------------------------------------

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ConfigError("failed writing file '" + path + "'");
}

// Surfaces --------------------------------------------------------------------

std::string SurfaceToJson(const RejectionSurface& s) {
  json j = Header("naps-rejection-surface");
  j["statistic"] = Index(s.statistic());
  json binning;
  binning["categorical"] = s.binning().is_categorical();
  if (s.binning().is_categorical()) {
    binning["categories"] = s.binning().num_bins();
  } else {
    binning["edges"] = s.binning().edges();
  }
  j["binning"] = binning;
  j["grid"] = s.grid().values;
  json cells = json::array();
  for (Label y : kLabels) {
    json per_label = json::array();
    if (s.has_label(y)) {
      for (std::size_t b = 0; b < s.binning().num_bins(); ++b) {
        const SurfaceCell& c = s.cell(y, b);
        per_label.push_back(json{{"count", c.count}, {"fitted", c.fitted}});
      }
    }
    cells.push_back(per_label);
  }
  j["cells"] = cells;
  j["meta"] = json{{"calibration_size", s.meta().calibration_size},
                   {"grid_size", s.meta().grid_size},
                   {"seed", s.meta().seed}};
  return Dump(j);
}

RejectionSurface SurfaceFromJson(const std::string& text) {
  const json j = Parse(text, "rejection surface");
  RequireSchema(j, "naps-rejection-surface");
  try {
    const Label statistic = LabelFromInt(At(j, "statistic").get<int>());
    const json& b = At(j, "binning");
    const NuBinning binning =
        At(b, "categorical").get<bool>()
            ? NuBinning::Categorical(At(b, "categories").get<std::size_t>())
            : NuBinning::FromEdges(At(b, "edges").get<std::vector<double>>());
    CutoffGrid grid = CutoffGrid::FromValues(At(j, "grid").get<std::vector<double>>());
    std::array<std::vector<SurfaceCell>, 2> cells;
    const json& jc = At(j, "cells");
    if (!jc.is_array() || jc.size() != 2) {
      throw ConfigError("surface 'cells' must hold two label arrays");
    }
    for (int y = 0; y < 2; ++y) {
      for (const json& c : jc[y]) {
        cells[y].push_back(SurfaceCell{At(c, "fitted").get<std::vector<double>>(),
                                       At(c, "count").get<std::size_t>()});
      }
    }
    const json& m = At(j, "meta");
    FitMetadata meta{At(m, "calibration_size").get<std::size_t>(),
                     At(m, "grid_size").get<std::size_t>(),
                     At(m, "seed").get<std::uint64_t>()};
    return RejectionSurface(statistic, binning, std::move(grid), std::move(cells), meta);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed rejection surface: ") + e.what());
  }
}

// Classifier ------------------------------------------------------------------

std::string ClassifierToJson(const ClassifierModel& model) {
  json j = Header("naps-classifier");
  switch (model.kind()) {
    case ClassifierModel::Kind::kAnalyticMarginal:
      j["kind"] = "analytic-marginal";
      j["train"] = GenerativeToJson(model.train_config());
      break;
    case ClassifierModel::Kind::kNuConditional:
      j["kind"] = "nu-conditional";
      j["train"] = GenerativeToJson(model.train_config());
      break;
    case ClassifierModel::Kind::kHistogram:
      j["kind"] = "histogram";
      j["edges"] = model.histogram().edges;
      j["probability"] = model.histogram().probability;
      j["class1_prior"] = model.histogram().class1_prior;
      break;
  }
  return Dump(j);
}

ClassifierModel ClassifierFromJson(const std::string& text) {
  const json j = Parse(text, "classifier");
  RequireSchema(j, "naps-classifier");
  try {
    const std::string kind = At(j, "kind").get<std::string>();
    if (kind == "analytic-marginal") {
      return ClassifierModel::AnalyticMarginal(GenerativeFromJson(At(j, "train")));
    }
    if (kind == "nu-conditional") {
      return ClassifierModel::NuConditional(GenerativeFromJson(At(j, "train")));
    }
    if (kind == "histogram") {
      HistogramModel h;
      h.edges = At(j, "edges").get<std::vector<double>>();
      h.probability = At(j, "probability").get<std::vector<double>>();
      h.class1_prior = GetNum(At(j, "class1_prior"));
      return ClassifierModel::Histogram(std::move(h));
    }
    throw ConfigError("unknown classifier kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed classifier: ") + e.what());
  }
}

// Regions ---------------------------------------------------------------------

std::string RegionToJson(const NuisanceRegion& region) {
  json j = Header("naps-nuisance-region");
  j["continuous"] = region.continuous;
  j["flagged_empty"] = region.flagged_empty;
  if (region.continuous) {
    json iv = json::array();
    for (const Interval& i : region.intervals) iv.push_back(json::array({i.lo, i.hi}));
    j["intervals"] = iv;
  } else {
    j["categories"] = region.categories;
  }
  return Dump(j);
}

NuisanceRegion RegionFromJson(const std::string& text, const NuisanceSpace& space) {
  const json j = Parse(text, "nuisance region");
  RequireSchema(j, "naps-nuisance-region");
  try {
    if (At(j, "flagged_empty").get<bool>()) return NuisanceRegion::Empty(space);
    if (At(j, "continuous").get<bool>()) {
      std::vector<Interval> iv;
      for (const json& p : At(j, "intervals")) {
        iv.push_back({GetNum(p.at(0)), GetNum(p.at(1))});
      }
      return NuisanceRegion::FromIntervals(std::move(iv), space);
    }
    return NuisanceRegion::FromCategories(
        At(j, "categories").get<std::vector<std::size_t>>(), space);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed nuisance region: ") + e.what());
  }
}

// Config ----------------------------------------------------------------------

namespace {

json ConfigBody(const ExperimentConfig& c) {
  json j;
  j["scenario"] = ScenarioName(c.scenario);
  j["class1_probability"] = c.class1_probability;
  j["train_prior"] = PriorToJson(c.train_prior);
  j["target_prior"] = PriorToJson(c.target_prior);
  j["target_class0_rate_multiplier"] = c.target_class0_rate_multiplier;
  j["classifier"] = c.classifier;
  j["histogram_bins"] = c.histogram_bins;
  j["sizes"] = json{{"train", c.train_size},
                    {"calibration", c.calibration_size},
                    {"evaluation", c.evaluation_size}};
  j["alphas"] = c.alphas;
  j["gamma"] = c.gamma.ToString();
  j["methods"] = c.methods;
  j["nu_bins"] = c.nu_bins;
  j["grid_size"] = c.grid_size;
  j["sweep"] = json{{"alpha", c.sweep_alpha},
                    {"gamma_min", c.sweep_gamma_min},
                    {"gamma_max", c.sweep_gamma_max},
                    {"points", c.sweep_points}};
  j["invariance_min_cell"] = c.invariance_min_cell;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

std::string ConfigToJson(const ExperimentConfig& c) {
  json j = ConfigBody(c);
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return Dump(j);
}

ExperimentConfig ConfigFromJson(const std::string& text) {
  const json j = Parse(text, "experiment config");
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "scenario", "class1_probability", "train_prior", "target_prior",
      "target_class0_rate_multiplier", "classifier", "histogram_bins", "sizes",
      "alphas", "gamma", "methods", "nu_bins", "grid_size", "sweep",
      "invariance_min_cell", "seed", "threads", "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("scenario")) {
      c.scenario = ScenarioFromName(j["scenario"].get<std::string>());
      if (c.scenario == Scenario::kDiscreteToy) {
        const GenerativeConfig toy = DiscreteToyConfig();
        c.train_prior = toy.prior_class0;
        c.target_prior = toy.prior_class0;
        c.methods = {"standard", "class-conditional", "bayes", "naps"};
      }
    }
    if (j.contains("class1_probability")) c.class1_probability = GetNum(j["class1_probability"]);
    if (j.contains("train_prior")) c.train_prior = PriorFromJson(j["train_prior"]);
    if (j.contains("target_prior")) c.target_prior = PriorFromJson(j["target_prior"]);
    if (j.contains("target_class0_rate_multiplier")) {
      c.target_class0_rate_multiplier = GetNum(j["target_class0_rate_multiplier"]);
    }
    if (j.contains("classifier")) c.classifier = j["classifier"].get<std::string>();
    if (j.contains("histogram_bins")) c.histogram_bins = j["histogram_bins"].get<int>();
    if (j.contains("sizes")) {
      const json& s = j["sizes"];
      for (const auto& [key, value] : s.items()) {
        if (key != "train" && key != "calibration" && key != "evaluation") {
          throw ConfigError("unknown sizes key '" + key + "'");
        }
      }
      if (s.contains("train")) c.train_size = s["train"].get<std::size_t>();
      if (s.contains("calibration")) c.calibration_size = s["calibration"].get<std::size_t>();
      if (s.contains("evaluation")) c.evaluation_size = s["evaluation"].get<std::size_t>();
    }
    if (j.contains("alphas")) c.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("gamma")) {
      c.gamma = j["gamma"].is_number() ? GammaRule{GammaRule::Kind::kFixed, GetNum(j["gamma"])}
                                       : GammaRule::Parse(j["gamma"].get<std::string>());
    }
    if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("nu_bins")) c.nu_bins = j["nu_bins"].get<int>();
    if (j.contains("grid_size")) c.grid_size = j["grid_size"].get<std::size_t>();
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      for (const auto& [key, value] : s.items()) {
        if (key != "alpha" && key != "gamma_min" && key != "gamma_max" && key != "points") {
          throw ConfigError("unknown sweep key '" + key + "'");
        }
      }
      if (s.contains("alpha")) c.sweep_alpha = GetNum(s["alpha"]);
      if (s.contains("gamma_min")) c.sweep_gamma_min = GetNum(s["gamma_min"]);
      if (s.contains("gamma_max")) c.sweep_gamma_max = GetNum(s["gamma_max"]);
      if (s.contains("points")) c.sweep_points = s["points"].get<int>();
    }
    if (j.contains("invariance_min_cell")) {
      c.invariance_min_cell = j["invariance_min_cell"].get<std::size_t>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: '" + path + "'");
  try {
    return ConfigFromJson(ReadTextFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

// Reports ---------------------------------------------------------------------

std::string ReportToJson(const ExperimentReport& report) {
  json j = Header("naps-report");
  // Thread count and output directory do not affect results.
  j["config"] = ConfigBody(report.config);
  json results = json::array();
  for (const MethodResult& r : report.results) {
    const MetricsTable& m = r.metrics;
    json e;
    e["method"] = r.method;
    e["alpha"] = r.alpha;
    e["gamma"] = r.gamma;
    e["cutoff"] = json::array({Num(r.cutoff[0]), Num(r.cutoff[1])});
    e["saturated"] = r.saturated;
    e["n"] = m.n;
    json counts;
    for (int y = 0; y < 2; ++y) {
      counts["y" + std::to_string(y)] = json{{"empty", m.counts[y][0]},
                                             {"only0", m.counts[y][1]},
                                             {"only1", m.counts[y][2]},
                                             {"both", m.counts[y][3]}};
    }
    e["counts"] = counts;
    e["marginal_coverage"] = RateToJson(m.marginal_coverage);
    e["coverage_given_y"] =
        json::array({RateToJson(m.coverage_given_y[0]), RateToJson(m.coverage_given_y[1])});
    json cells = json::array();
    for (const CellCoverage& c : m.coverage_given_y_bin) {
      json cc = RateToJson(c.coverage);
      cc["y"] = Index(c.y);
      cc["bin"] = c.bin;
      cc["nu_lo"] = c.nu_lo;
      cc["nu_hi"] = c.nu_hi;
      cells.push_back(cc);
    }
    e["coverage_given_y_bin"] = cells;
    e["power"] = json::array({RateToJson(m.power[0]), RateToJson(m.power[1])});
    e["marginal_power"] = RateToJson(m.marginal_power);
    e["precision"] = json::array({RateToJson(m.precision[0]), RateToJson(m.precision[1])});
    e["ambiguity"] = RateToJson(m.ambiguity);
    e["empty"] = RateToJson(m.empty);
    e["mean_size"] = m.mean_size;
    e["mean_size_se"] = m.mean_size_se;
    results.push_back(e);
  }
  j["results"] = results;
  j["warnings"] = report.warnings;
  return Dump(j);
}

void WriteReportCsv(std::ostream& out, const ExperimentReport& report) {
  out << "method,alpha,gamma,metric,y,bin,nu_lo,nu_hi,value,se,hits,total\n";
  auto row = [&](const MethodResult& r, const std::string& metric, const std::string& y,
                 const std::string& bin, const std::string& lo, const std::string& hi,
                 const Rate& rate) {
    out << r.method << ',' << FormatDouble(r.alpha) << ',' << FormatDouble(r.gamma)
        << ',' << metric << ',' << y << ',' << bin << ',' << lo << ',' << hi << ','
        << FormatDouble(rate.value) << ',' << FormatDouble(rate.standard_error) << ','
        << rate.hits << ',' << rate.total << '\n';
  };
  for (const MethodResult& r : report.results) {
    const MetricsTable& m = r.metrics;
    row(r, "marginal_coverage", "", "", "", "", m.marginal_coverage);
    row(r, "marginal_power", "", "", "", "", m.marginal_power);
    row(r, "ambiguity", "", "", "", "", m.ambiguity);
    row(r, "empty", "", "", "", "", m.empty);
    for (int y = 0; y < 2; ++y) {
      const std::string ys = std::to_string(y);
      row(r, "coverage_given_y", ys, "", "", "", m.coverage_given_y[y]);
      row(r, "power", ys, "", "", "", m.power[y]);
      row(r, "precision", ys, "", "", "", m.precision[y]);
    }
    for (const CellCoverage& c : m.coverage_given_y_bin) {
      row(r, "coverage_given_y_bin", std::to_string(Index(c.y)), std::to_string(c.bin),
          FormatDouble(c.nu_lo), FormatDouble(c.nu_hi), c.coverage);
    }
  }
}

std::string GammaSweepToJson(const GammaSweepReport& report) {
  json j = Header("naps-gamma-sweep");
  j["alpha"] = report.alpha;
  json rows = json::array();
  for (const GammaSweepRow& r : report.rows) {
    rows.push_back(json{{"gamma", r.gamma},
                        {"x0_star", r.x0_star},
                        {"x0_arg_nu", r.x0_arg_nu},
                        {"region", json::array({r.region.lo, r.region.hi})},
                        {"power", r.power},
                        {"power_mc", r.power_mc},
                        {"power_mc_se", r.power_mc_se}});
  }
  j["rows"] = rows;
  j["skipped"] = report.skipped;
  j["minimizing_gamma"] = report.minimizing_gamma;
  j["warnings"] = report.warnings;
  return Dump(j);
}

void WriteGammaSweepCsv(std::ostream& out, const GammaSweepReport& report) {
  out << "gamma,x0_star,x0_arg_nu,region_lo,region_hi,power,power_mc,power_mc_se\n";
  for (const GammaSweepRow& r : report.rows) {
    out << FormatDouble(r.gamma) << ',' << FormatDouble(r.x0_star) << ','
        << FormatDouble(r.x0_arg_nu) << ',' << FormatDouble(r.region.lo) << ','
        << FormatDouble(r.region.hi) << ',' << FormatDouble(r.power) << ','
        << FormatDouble(r.power_mc) << ',' << FormatDouble(r.power_mc_se) << '\n';
  }
}

std::string InvarianceToJson(const InvarianceReport& report) {
  json j = Header("naps-invariance");
  json cells = json::array();
  for (const InvarianceCell& c : report.cells) {
    cells.push_back(json{{"y", Index(c.y)},
                         {"bin", c.bin},
                         {"nu_lo", c.nu_lo},
                         {"nu_hi", c.nu_hi},
                         {"target_count", c.target_count},
                         {"sup_distance", c.sup_distance},
                         {"skipped", c.skipped}});
  }
  j["cells"] = cells;
  j["max_sup_distance"] = report.max_sup_distance;
  j["warnings"] = report.warnings;
  return Dump(j);
}

std::string DiagnoseToJson(const DiagnoseReport& report) {
  json j = Header("naps-pit");
  j["nuisance_aware"] = PitToJson(report.nuisance_aware);
  j["nuisance_ignoring"] = PitToJson(report.nuisance_ignoring);
  return Dump(j);
}

void WriteDiagnoseCsv(std::ostream& out, const DiagnoseReport& report) {
  out << "surface,y,nu_lo,nu_hi,count,u,ecdf\n";
  auto emit = [&](const std::string& name, const PitReport& r) {
    for (const PitBinResult& b : r.bins) {
      for (std::size_t k = 0; k < b.ecdf.size(); ++k) {
        out << name << ',' << Index(b.bin.y) << ',' << FormatDouble(b.bin.nu_lo) << ','
            << FormatDouble(b.bin.nu_hi) << ',' << b.count << ','
            << FormatDouble(static_cast<double>(k + 1) / kPitGridPoints) << ','
            << FormatDouble(b.ecdf[k]) << '\n';
      }
    }
  };
  emit("nuisance-aware", report.nuisance_aware);
  emit("nuisance-ignoring", report.nuisance_ignoring);
}

}  // namespace naps
