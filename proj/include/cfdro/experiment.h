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

#ifndef CFDRO_EXPERIMENT_H_
#define CFDRO_EXPERIMENT_H_

// Experiment configs, schema "experiment/1":
//
//   {
//     "version": "experiment/1",
//     "datasets": ["lin", "example1", "adult:data/adult.csv",
//                  "compas:data/compas.csv", "custom:model.json:rows.csv"],
//     "trainers": [
//       {"kind": "erm"},
//       {"kind": "cdro_closed", "label": "CDRO", "delta": 0.5, "norm": "l1"}
//     ],
//     "seeds": [0, 1, 2],
//     "radii": [0.05, 0.01],
//     "n": 2000,
//     "test_fraction": 0.2,
//     "metric_norm": "l1",
//     "loss": "log_exponential",
//     "optimizer": {"learning_rate": 0.001, "batch_size": 100, "epochs": 10},
//     "output_dir": "runs/lin"
//   }
//
// Trainer entries accept kind, label, delta, power, norm, loss, optimizer
// and constraint ("finite" | "nullspace"); missing fields fall back to the
// top-level values. Only "datasets", "trainers" and "output_dir" are
// required.

#include <cstdint>
#include <string>
#include <vector>

#include "cfdro/fairness_metrics.h"
#include "cfdro/objectives.h"
#include "json.hpp"

namespace cfdro {

inline constexpr char kExperimentSchemaVersion[] = "experiment/1";
inline constexpr char kReportSchemaVersion[] = "report/1";

struct ExperimentConfig {
  std::vector<std::string> datasets;
  std::vector<TrainerConfig> trainers;
  std::vector<uint64_t> seeds;
  std::vector<double> radii = {0.05, 0.01};
  int n = 2000;
  double test_fraction = 0.2;
  NormSpec metric_norm;
  std::string output_dir;

  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& doc);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct RunRecord {
  std::string dataset;
  std::string trainer;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  ModelParams params;
  std::vector<double> trace;
  long train_rows = 0;
  long test_rows = 0;
};

struct ExperimentSummary {
  std::vector<RunRecord> runs;  // config order: dataset, trainer, seed
  bool any_trainer_failed = false;
};

// One cell: split, standardize on the training side, fit the linear SCM
// on the training side, train, evaluate on the held-out side.
RunRecord RunCell(const ExperimentConfig& cfg, const std::string& dataset,
                  const TrainerConfig& trainer, uint64_t seed);

// Runs every cell (in parallel up to CFDRO_THREADS), writes one JSON per
// run plus every report format under output_dir.
ExperimentSummary RunExperiment(const ExperimentConfig& cfg);

nlohmann::json RunToJson(const RunRecord& run, const std::vector<double>& radii,
                         double test_fraction);

// format: "csv" | "json" | "md" | "long". Reads the run JSONs listed in
// the directory manifest; returns the written path.
std::string EmitReport(const std::string& dir, const std::string& format);

}  // namespace cfdro

#endif  // CFDRO_EXPERIMENT_H_
