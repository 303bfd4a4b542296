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

#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "naps/dataset_io.hpp"
#include "naps/error.hpp"
#include "naps/experiment.hpp"
#include "naps/serialize.hpp"

namespace naps::cli {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> methods;
  std::string alpha;
  std::string gamma;
  std::optional<int> threads;
  std::string fitted;
};

void AddCommonFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--method", o.methods, "Method to run (repeatable)")
      ->allow_extra_args(false);
  cmd->add_option("--alpha", o.alpha, "Comma-separated alpha grid");
  cmd->add_option("--gamma", o.gamma, "gamma rule: <value> or alpha*<factor>");
  cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on it)");
}

std::vector<double> ParseCsv(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("empty entry in alpha list '" + text + "'");
    values.push_back(ParseDouble(item));
  }
  if (values.empty()) throw ConfigError("empty alpha list");
  return values;
}

ExperimentConfig Resolve(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : LoadExperimentConfig(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.methods.empty()) c.methods = o.methods;
  if (!o.alpha.empty()) c.alphas = ParseCsv(o.alpha);
  if (!o.gamma.empty()) c.gamma = GammaRule::Parse(o.gamma);
  if (o.threads) c.threads = *o.threads;
  c.Validate();
  return c;
}

std::string PrepareOut(const ExperimentConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + c.output_dir +
                      "': " + ec.message());
  }
  return c.output_dir;
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void Write(const std::string& path, const std::string& content, std::ostream& out) {
  WriteTextFile(path, content);
  out << "wrote " << path << '\n';
}

template <typename Fn>
std::string Csv(Fn&& fn) {
  std::ostringstream ss;
  fn(ss);
  return ss.str();
}

void Simulate(const ExperimentConfig& c, std::ostream& out) {
  const std::string dir = PrepareOut(c);
  const NuisanceSpace space = c.space();
  Write(Join(dir, "calibration.csv"),
        Csv([&](std::ostream& s) { WriteDatasetCsv(s, CalibrationData(c), space); }), out);
  Write(Join(dir, "evaluation.csv"),
        Csv([&](std::ostream& s) { WriteDatasetCsv(s, EvaluationData(c), space); }), out);
  if (c.classifier == "histogram") {
    const Dataset train = SampleDataset(c.TrainModel(), c.train_size, c.seed,
                                        StreamId(Stream::kTrain), c.threads);
    Write(Join(dir, "train.csv"),
          Csv([&](std::ostream& s) { WriteDatasetCsv(s, train, space); }), out);
  }
}

void Fit(const ExperimentConfig& c, std::ostream& out) {
  const std::string dir = PrepareOut(c);
  const FittedModels fitted = FitModels(c);
  Write(Join(dir, "classifier.json"), ClassifierToJson(fitted.classifier), out);
  for (Label y : kLabels) {
    Write(Join(dir, "surface_tau" + std::to_string(Index(y)) + ".json"),
          SurfaceToJson(fitted.surfaces[Index(y)]), out);
  }
}

FittedModels LoadFitted(const std::string& dir) {
  FittedModels f;
  f.classifier = ClassifierFromJson(ReadTextFile(Join(dir, "classifier.json")));
  for (Label y : kLabels) {
    f.surfaces[Index(y)] = SurfaceFromJson(
        ReadTextFile(Join(dir, "surface_tau" + std::to_string(Index(y)) + ".json")));
  }
  return f;
}

void Evaluate(const ExperimentConfig& c, const std::string& fitted_dir,
              std::ostream& out) {
  const std::string dir = PrepareOut(c);
  std::optional<FittedModels> fitted;
  if (!fitted_dir.empty()) fitted = LoadFitted(fitted_dir);
  const ExperimentReport report = RunExperiment(c, fitted ? &*fitted : nullptr);
  Write(Join(dir, "report.json"), ReportToJson(report), out);
  Write(Join(dir, "report.csv"),
        Csv([&](std::ostream& s) { WriteReportCsv(s, report); }), out);
}

void DiagnoseCmd(const ExperimentConfig& c, std::ostream& out) {
  const std::string dir = PrepareOut(c);
  const DiagnoseReport pit = Diagnose(c);
  Write(Join(dir, "pit.json"), DiagnoseToJson(pit), out);
  Write(Join(dir, "pit.csv"), Csv([&](std::ostream& s) { WriteDiagnoseCsv(s, pit); }),
        out);
  Write(Join(dir, "invariance.json"), InvarianceToJson(InvarianceCheck(c)), out);
}

void SweepGamma(const ExperimentConfig& c, bool alpha_given, std::ostream& out) {
  const std::string dir = PrepareOut(c);
  const double alpha = alpha_given ? c.alphas.front() : c.sweep_alpha;
  const GammaSweepReport report =
      GammaSweep(c, alpha, LogGrid(c.sweep_gamma_min, c.sweep_gamma_max, c.sweep_points));
  Write(Join(dir, "gamma_sweep.json"), GammaSweepToJson(report), out);
  Write(Join(dir, "gamma_sweep.csv"),
        Csv([&](std::ostream& s) { WriteGammaSweepCsv(s, report); }), out);
  out << "minimizing gamma " << FormatDouble(report.minimizing_gamma) << '\n';
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nuisance-aware prediction sets: simulation, fitting and evaluation", "naps"};
  app.require_subcommand(1);
  Options o;
  CLI::App* simulate = app.add_subcommand("simulate", "Write calibration and evaluation datasets");
  CLI::App* fit = app.add_subcommand("fit", "Fit the classifier and rejection surfaces");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate methods and write a metrics report");
  CLI::App* diagnose = app.add_subcommand("diagnose", "PIT and invariance diagnostics");
  CLI::App* sweep = app.add_subcommand("sweep-gamma", "Oracle cutoff and power across gamma");
  for (CLI::App* cmd : {simulate, fit, evaluate, diagnose, sweep}) AddCommonFlags(cmd, o);
  evaluate->add_option("--fitted", o.fitted, "Directory written by 'fit'; skips refitting");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    const auto used = app.get_subcommands();
    out << (used.empty() ? app.help() : used.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto used = app.get_subcommands();
    err << "error: " << e.what() << "\n\n"
        << (used.empty() ? app.help() : used.front()->help());
    return kExitConfig;
  }

  try {
    const ExperimentConfig c = Resolve(o);
    if (simulate->parsed()) {
      Simulate(c, out);
    } else if (fit->parsed()) {
      Fit(c, out);
    } else if (evaluate->parsed()) {
      Evaluate(c, o.fitted, out);
    } else if (diagnose->parsed()) {
      DiagnoseCmd(c, out);
    } else {
      SweepGamma(c, !o.alpha.empty(), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace naps::cli
