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

#include "cfdro/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <omp.h>

#include "cfdro/error.h"
#include "cfdro/parallel.h"
#include "cfdro/scm_json.h"
#include "cfdro/trainer.h"

namespace cfdro {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Format(const char* spec, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, value);
  return buffer;
}

std::string RadiusKey(double r) { return Format("%g", r); }

OptimizerConfig ParseOptimizer(const json& doc, OptimizerConfig base) {
  if (doc.contains("learning_rate")) base.learning_rate = doc.at("learning_rate").get<double>();
  if (doc.contains("batch_size")) base.batch_size = doc.at("batch_size").get<int>();
  if (doc.contains("epochs")) base.epochs = doc.at("epochs").get<int>();
  return base;
}

struct Source {
  Dataset data;
  CausalGraph graph;
};

Source LoadSource(const std::string& id, int n, uint64_t seed) {
  if (id == "lin") return {GenerateLin(n, seed).data, LinGraph()};
  if (id == "example1") {
    return {GenerateExample1Data(Example1Model::kLinear, n, seed).data,
            GraphOf(GenerateExample1(Example1Model::kLinear))};
  }
  if (id.starts_with("adult:")) return {LoadCsv(id.substr(6), "adult"), AdultGraph()};
  if (id.starts_with("compas:")) return {LoadCsv(id.substr(7), "compas"), CompasGraph()};
  if (id.starts_with("custom:")) {
    const std::string rest = id.substr(7);
    const size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw SchemaError("custom datasets read 'custom:<scm.json>:<rows.csv>'");
    }
    const std::string model = rest.substr(0, colon);
    return {LoadCsv(rest.substr(colon + 1), "custom:" + model),
            GraphOf(LoadScmFile(model).scm)};
  }
  throw SchemaError("unknown dataset '" + id + "'");
}

std::string Slug(const std::string& text) {
  std::string out;
  for (char c : text) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::string DatasetSlug(const std::vector<std::string>& datasets, const std::string& id) {
  const size_t k = static_cast<size_t>(
      std::find(datasets.begin(), datasets.end(), id) - datasets.begin());
  const std::string head = id.substr(0, id.find(':'));
  return "d" + std::to_string(k) + "_" + Slug(head);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing artifact '" + path.string() + "'");
  return json::parse(in);
}

struct Cell {
  std::string dataset;
  std::string trainer;
  std::vector<std::vector<double>> columns;  // per metric column, one value per run
  long runs = 0;
  long failed = 0;
};

struct Aggregate {
  std::vector<std::string> headers;
  std::vector<Cell> cells;
};

double Mean(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  return PairwiseSum(x) / static_cast<double>(x.size());
}

double SampleStd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = Mean(x);
  std::vector<double> sq;
  for (double v : x) sq.push_back((v - m) * (v - m));
  return std::sqrt(PairwiseSum(sq) / static_cast<double>(x.size() - 1));
}

Aggregate Collect(const fs::path& dir) {
  const json manifest = ReadJson(dir / "manifest.json");
  const auto radii = manifest.at("radii").get<std::vector<double>>();
  const auto files = manifest.at("runs").get<std::vector<std::string>>();
  if (files.empty()) throw Error("run set is empty");
  Aggregate agg;
  agg.headers.push_back("Acc");
  for (double r : radii) agg.headers.push_back("U_" + RadiusKey(r));
  agg.headers.push_back("CF");
  for (double r : radii) agg.headers.push_back("R_" + RadiusKey(r));
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (const auto& file : files) {
    const json run = ReadJson(dir / file);
    const auto key = std::make_pair(run.at("dataset").get<std::string>(),
                                    run.at("trainer").get<std::string>());
    if (!index.count(key)) {
      index[key] = agg.cells.size();
      agg.cells.push_back({key.first, key.second,
                           std::vector<std::vector<double>>(agg.headers.size()), 0, 0});
    }
    Cell& cell = agg.cells[index[key]];
    ++cell.runs;
    if (!run.at("ok").get<bool>()) {
      ++cell.failed;
      continue;
    }
    const json& m = run.at("metrics");
    size_t c = 0;
    cell.columns[c++].push_back(m.at("accuracy").get<double>());
    for (double r : radii) cell.columns[c++].push_back(m.at("unfair").at(RadiusKey(r)).get<double>());
    cell.columns[c++].push_back(m.at("cf").get<double>());
    for (double r : radii) {
      cell.columns[c++].push_back(m.at("nonrobust").at(RadiusKey(r)).get<double>());
    }
  }
  return agg;
}

std::string AggregateCsv(const Aggregate& agg) {
  std::string out = "dataset,trainer,runs,failed";
  for (const auto& h : agg.headers) out += "," + h + "_mean," + h + "_std";
  out += "\n";
  for (const auto& cell : agg.cells) {
    out += cell.dataset + "," + cell.trainer + "," + std::to_string(cell.runs) + "," +
           std::to_string(cell.failed);
    for (const auto& col : cell.columns) {
      out += "," + Format("%.17g", Mean(col)) + "," + Format("%.17g", SampleStd(col));
    }
    out += "\n";
  }
  return out;
}

std::string AggregateJson(const Aggregate& agg) {
  json doc = {{"version", kReportSchemaVersion}, {"columns", agg.headers}};
  json rows = json::array();
  for (const auto& cell : agg.cells) {
    json row = {{"dataset", cell.dataset}, {"trainer", cell.trainer},
                {"runs", cell.runs}, {"failed", cell.failed}};
    for (size_t c = 0; c < agg.headers.size(); ++c) {
      row["mean"][agg.headers[c]] = Mean(cell.columns[c]);
      row["std"][agg.headers[c]] = SampleStd(cell.columns[c]);
    }
    rows.push_back(row);
  }
  doc["cells"] = rows;
  return doc.dump(2) + "\n";
}

std::string AggregateMarkdown(const Aggregate& agg) {
  std::string out;
  std::vector<std::string> datasets;
  for (const auto& cell : agg.cells) {
    if (std::find(datasets.begin(), datasets.end(), cell.dataset) == datasets.end()) {
      datasets.push_back(cell.dataset);
    }
  }
  for (const auto& ds : datasets) {
    std::vector<const Cell*> rows;
    for (const auto& cell : agg.cells) {
      if (cell.dataset == ds) rows.push_back(&cell);
    }
    out += "### " + ds + "\n\n| Trainer |";
    for (const auto& h : agg.headers) out += " " + h + " |";
    out += "\n|---|";
    for (size_t c = 0; c < agg.headers.size(); ++c) out += "---|";
    out += "\n";
    // Accuracy is better high, every other column low.
    std::vector<double> best(agg.headers.size(), std::nan(""));
    for (size_t c = 0; c < agg.headers.size(); ++c) {
      for (const Cell* cell : rows) {
        const double m = Mean(cell->columns[c]);
        if (std::isnan(m)) continue;
        if (std::isnan(best[c]) || (c == 0 ? m > best[c] : m < best[c])) best[c] = m;
      }
    }
    for (const Cell* cell : rows) {
      out += "| " + cell->trainer + " |";
      for (size_t c = 0; c < agg.headers.size(); ++c) {
        const double m = Mean(cell->columns[c]);
        std::string text = std::isnan(m) ? "n/a"
                                         : Format("%.3f", m) + " ± " +
                                               Format("%.3f", SampleStd(cell->columns[c]));
        if (!std::isnan(m) && m == best[c]) text = "**" + text + "**";
        out += " " + text + " |";
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

std::string LongCsv(const fs::path& dir) {
  const json manifest = ReadJson(dir / "manifest.json");
  const auto radii = manifest.at("radii").get<std::vector<double>>();
  std::string out = "dataset,trainer,seed,metric,value\n";
  for (const auto& file : manifest.at("runs").get<std::vector<std::string>>()) {
    const json run = ReadJson(dir / file);
    if (!run.at("ok").get<bool>()) continue;
    const std::string head = run.at("dataset").get<std::string>() + "," +
                             run.at("trainer").get<std::string>() + "," +
                             std::to_string(run.at("seed").get<uint64_t>()) + ",";
    const json& m = run.at("metrics");
    out += head + "Acc," + Format("%.17g", m.at("accuracy").get<double>()) + "\n";
    for (double r : radii) {
      out += head + "U_" + RadiusKey(r) + "," +
             Format("%.17g", m.at("unfair").at(RadiusKey(r)).get<double>()) + "\n";
    }
    out += head + "CF," + Format("%.17g", m.at("cf").get<double>()) + "\n";
    for (double r : radii) {
      out += head + "R_" + RadiusKey(r) + "," +
             Format("%.17g", m.at("nonrobust").at(RadiusKey(r)).get<double>()) + "\n";
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (datasets.empty() || trainers.empty() || seeds.empty()) {
    throw SchemaError("experiment needs datasets, trainers and seeds");
  }
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw SchemaError("experiment seeds must be distinct");
  }
  std::set<std::string> names, keys;
  for (const auto& t : trainers) {
    t.Validate();
    if (!names.insert(t.DisplayName()).second) {
      throw SchemaError("duplicate trainer name '" + t.DisplayName() + "'");
    }
  }
  for (double r : radii) {
    if (!(r >= 0.0)) throw SchemaError("metric radii must be nonnegative");
    if (!keys.insert(RadiusKey(r)).second) throw SchemaError("duplicate metric radius");
  }
  if (n < 2) throw SchemaError("synthetic size must be at least 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw SchemaError("test_fraction must lie in (0, 1)");
  }
  if (output_dir.empty()) throw SchemaError("output_dir is required");
}

ExperimentConfig ExperimentConfigFromJson(const json& doc) {
  if (doc.contains("version") && doc.at("version") != kExperimentSchemaVersion) {
    throw SchemaError("unsupported experiment schema version");
  }
  ExperimentConfig cfg;
  try {
    cfg.datasets = doc.at("datasets").get<std::vector<std::string>>();
    cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("seeds")) {
      cfg.seeds = doc.at("seeds").get<std::vector<uint64_t>>();
    } else {
      for (uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
    }
    if (doc.contains("radii")) cfg.radii = doc.at("radii").get<std::vector<double>>();
    if (doc.contains("n")) cfg.n = doc.at("n").get<int>();
    if (doc.contains("test_fraction")) cfg.test_fraction = doc.at("test_fraction").get<double>();
    if (doc.contains("metric_norm")) {
      cfg.metric_norm = NormSpec::Parse(doc.at("metric_norm").get<std::string>());
    }
    const std::string loss = doc.value("loss", std::string("log_exponential"));
    const OptimizerConfig optimizer =
        doc.contains("optimizer") ? ParseOptimizer(doc.at("optimizer"), {}) : OptimizerConfig{};
    for (const auto& entry : doc.at("trainers")) {
      TrainerConfig t;
      t.kind = ParseTrainerKind(entry.at("kind").get<std::string>());
      t.label = entry.value("label", std::string());
      t.delta = entry.value("delta", 0.0);
      t.norm = entry.contains("norm") ? NormSpec::Parse(entry.at("norm").get<std::string>())
                                      : cfg.metric_norm;
      t.loss = LossSpec::Parse(entry.value("loss", loss));
      const double fallback = t.kind == TrainerKind::kCdroFirstOrder ? 2.0 : t.loss.power();
      t.power = entry.value("power", fallback);
      t.optimizer = entry.contains("optimizer") ? ParseOptimizer(entry.at("optimizer"), optimizer)
                                                : optimizer;
      const std::string constraint = entry.value("constraint", std::string("finite"));
      if (constraint == "nullspace") {
        t.constraint_mode = ConstraintMode::kNullspace;
      } else if (constraint != "finite") {
        throw SchemaError("constraint must be finite or nullspace");
      }
      cfg.trainers.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad experiment config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return ExperimentConfigFromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

RunRecord RunCell(const ExperimentConfig& cfg, const std::string& dataset,
                  const TrainerConfig& trainer, uint64_t seed) {
  RunRecord run;
  run.dataset = dataset;
  run.trainer = trainer.DisplayName();
  run.seed = seed;
  try {
    // Every trainer sees the same split for a given dataset and seed.
    const uint64_t data_seed = StableHash(dataset, seed);
    const Source source = LoadSource(dataset, cfg.n, data_seed);
    const Split split = StratifiedSplit(source.data, cfg.test_fraction, data_seed);
    const Dataset train = Standardize(split.train);
    const Dataset test = ApplyStandardization(split.test, train.standardization);
    const Scm scm = FitLinearScm(train, source.graph);

    TrainerConfig tc = trainer;
    tc.seed = StableHash(dataset + "|" + trainer.DisplayName(), seed);
    const TrainResult fit = Train(train, scm, tc);
    const CfdfMetric metric(scm, cfg.metric_norm);
    run.metrics = EvaluateMetrics(fit.params, metric, test, cfg.radii);
    run.metrics.seed = seed;
    run.metrics.trainer = run.trainer;
    run.metrics.dataset = dataset;
    run.params = fit.params;
    run.trace = fit.trace;
    run.train_rows = train.size();
    run.test_rows = test.size();
    run.ok = true;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

json RunToJson(const RunRecord& run, const std::vector<double>& radii, double test_fraction) {
  json doc = {{"version", kReportSchemaVersion},
              {"dataset", run.dataset},
              {"trainer", run.trainer},
              {"seed", run.seed},
              {"ok", run.ok}};
  if (!run.ok) {
    doc["error"] = run.error;
    return doc;
  }
  json unfair = json::object(), nonrobust = json::object();
  for (double r : radii) {
    unfair[RadiusKey(r)] = run.metrics.unfair.at(r);
    nonrobust[RadiusKey(r)] = run.metrics.nonrobust.at(r);
  }
  doc["metrics"] = {{"accuracy", run.metrics.accuracy},
                    {"cf", run.metrics.counterfactual},
                    {"unfair", unfair},
                    {"nonrobust", nonrobust}};
  doc["params"] = {{"theta", std::vector<double>(run.params.theta.data(),
                                                 run.params.theta.data() +
                                                     run.params.theta.size())},
                   {"intercept", run.params.intercept}};
  doc["trace"] = run.trace;
  doc["split"] = {{"test_fraction", test_fraction},
                  {"stratified", true},
                  {"train_rows", run.train_rows},
                  {"test_rows", run.test_rows}};
  return doc;
}

ExperimentSummary RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  struct Job {
    const std::string* dataset;
    const TrainerConfig* trainer;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& ds : cfg.datasets) {
    for (const auto& t : cfg.trainers) {
      for (uint64_t s : cfg.seeds) jobs.push_back({&ds, &t, s});
    }
  }
  ExperimentSummary summary;
  summary.runs.resize(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(MaxThreads())
  for (long k = 0; k < static_cast<long>(jobs.size()); ++k) {
    summary.runs[k] = RunCell(cfg, *jobs[k].dataset, *jobs[k].trainer, jobs[k].seed);
  }

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir / "runs");
  json files = json::array();
  for (const auto& run : summary.runs) {
    const std::string name = "runs/" + DatasetSlug(cfg.datasets, run.dataset) + "__" +
                             Slug(run.trainer) + "__s" + std::to_string(run.seed) + ".json";
    WriteText(dir / name, RunToJson(run, cfg.radii, cfg.test_fraction).dump(2) + "\n");
    files.push_back(name);
  }
  json manifest = {{"version", kReportSchemaVersion}, {"radii", cfg.radii}, {"runs", files}};
  WriteText(dir / "manifest.json", manifest.dump(2) + "\n");
  for (const char* format : {"csv", "json", "md", "long"}) EmitReport(cfg.output_dir, format);

  for (const auto& t : cfg.trainers) {
    bool all_failed = true;
    for (const auto& run : summary.runs) {
      if (run.trainer == t.DisplayName() && run.ok) all_failed = false;
    }
    summary.any_trainer_failed = summary.any_trainer_failed || all_failed;
  }
  return summary;
}

std::string EmitReport(const std::string& dir, const std::string& format) {
  const fs::path root(dir);
  if (!fs::exists(root / "manifest.json")) {
    throw Error("'" + dir + "' holds no run manifest");
  }
  fs::path target;
  std::string text;
  if (format == "csv") {
    target = root / "aggregate.csv";
    text = AggregateCsv(Collect(root));
  } else if (format == "json") {
    target = root / "aggregate.json";
    text = AggregateJson(Collect(root));
  } else if (format == "md" || format == "markdown") {
    target = root / "report.md";
    text = AggregateMarkdown(Collect(root));
  } else if (format == "long") {
    target = root / "long.csv";
    text = LongCsv(root);
  } else {
    throw SchemaError("unknown report format '" + format + "' (csv, json, md, long)");
  }
  WriteText(target, text);
  return target.string();
}

}  // namespace cfdro
