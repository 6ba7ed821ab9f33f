/*
 * Copyright 2026 The cfdro Authors.
 *
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


// Command line front end: run experiment configs, rebuild reports, run the
// oracle battery and write synthetic data.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cfdro/dataset.h"
#include "cfdro/error.h"
#include "cfdro/experiment.h"
#include "cfdro/verify.h"

namespace {

int RunCommand(const std::string& config_path) {
  const cfdro::ExperimentConfig cfg = cfdro::LoadExperimentConfig(config_path);
  const cfdro::ExperimentSummary summary = cfdro::RunExperiment(cfg);
  int failed = 0;
  for (const auto& run : summary.runs) {
    if (!run.ok) {
      ++failed;
      std::cerr << "run failed: " << run.dataset << " / " << run.trainer << " / seed "
                << run.seed << ": " << run.error << "\n";
    }
  }
  std::cout << summary.runs.size() << " runs, " << failed << " failed; reports in "
            << cfg.output_dir << "\n";
  return summary.any_trainer_failed ? 1 : 0;
}

int VerifyCommand(int budget, uint64_t seed, bool table1) {
  cfdro::VerifyOptions options;
  options.budget = budget;
  options.seed = seed;
  if (budget == 0) {
    std::cerr << "warning: budget 0 skips every randomized check\n";
  }
  auto results = cfdro::VerifySuite(options);
  if (table1) results.push_back(cfdro::CheckTable1().check);
  bool ok = true;
  for (const auto& r : results) {
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    std::printf("%s %-26s %s\n", tag, r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactually fair distributionally robust training"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Train and evaluate every cell of a config");
  run->add_option("--config", config, "experiment/1 JSON file")->required()->check(
      CLI::ExistingFile);

  std::string dir, format = "md";
  auto* report = app.add_subcommand("report", "Rebuild a report from a run directory");
  report->add_option("--dir", dir, "output_dir of a finished run")->required()->check(
      CLI::ExistingDirectory);
  report->add_option("--format", format, "csv | json | md | long")
      ->check(CLI::IsMember({"csv", "json", "md", "long"}));

  int budget = 25;
  uint64_t seed = cfdro::VerifyOptions{}.seed;
  bool table1 = false;
  auto* verify = app.add_subcommand("verify", "Run the oracle checks");
  verify->add_option("--budget", budget, "random instances per randomized check")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "seed for the random instances");
  verify->add_flag("--table1", table1, "also reproduce the LIN comparison (10 seeds, n = 2000)");

  int rows = 2000;
  uint64_t data_seed = 0;
  std::string out;
  auto* gen = app.add_subcommand("gen-lin", "Write a LIN sample as CSV");
  gen->add_option("--n", rows, "rows")->check(CLI::PositiveNumber);
  gen->add_option("--seed", data_seed, "sampling seed");
  gen->add_option("--out", out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return RunCommand(config);
    if (*report) {
      std::cout << cfdro::EmitReport(dir, format) << "\n";
      return 0;
    }
    if (*verify) return VerifyCommand(budget, seed, table1);
    if (*gen) {
      cfdro::WriteCsv(cfdro::GenerateLin(rows, data_seed).data, out);
      return 0;
    }
  } catch (const cfdro::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
