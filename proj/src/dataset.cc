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

#include "cfdro/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/QR>

#include "cfdro/error.h"
#include "cfdro/scm_json.h"

namespace cfdro {
namespace {

double Sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

std::string Trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(Trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(Trim(cell));
  return cells;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const {
    for (size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    throw SchemaError("missing required column '" + name + "'");
  }
};

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    auto cells = SplitCsvLine(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw SchemaError("row " + std::to_string(table.rows.size() + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw SchemaError("'" + path + "' is empty");
  if (table.rows.empty()) throw SchemaError("'" + path + "' has no data rows");
  return table;
}

[[noreturn]] void BadCell(size_t row, const std::string& column, const std::string& cell) {
  throw SchemaError("row " + std::to_string(row + 1) + ", column '" + column +
                    "': cannot parse '" + cell + "'");
}

bool TryNumber(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  try {
    size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(value)) return false;
    *out = value;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

using Encoder = double (*)(const std::string& cell, bool* ok);

double EncodeReal(const std::string& cell, bool* ok) {
  double value = 0.0;
  *ok = TryNumber(cell, &value);
  return value;
}

double EncodeBinaryNumber(const std::string& cell, bool* ok) {
  double value = 0.0;
  *ok = TryNumber(cell, &value) && (value == 0.0 || value == 1.0);
  return value;
}

double EncodeSex(const std::string& cell, bool* ok) {
  *ok = true;
  if (cell == "Male" || cell == "male" || cell == "M") return 1.0;
  if (cell == "Female" || cell == "female" || cell == "F") return 0.0;
  return EncodeBinaryNumber(cell, ok);
}

double EncodeCountry(const std::string& cell, bool* ok) {
  *ok = true;
  if (cell == "United-States") return 1.0;
  if (cell == "?" || cell.empty()) {
    *ok = false;
    return 0.0;
  }
  double value = 0.0;
  if (TryNumber(cell, &value)) return EncodeBinaryNumber(cell, ok);
  return 0.0;
}

double EncodeMarital(const std::string& cell, bool* ok) {
  *ok = true;
  if (cell.starts_with("Married")) return 1.0;
  if (cell == "?" || cell.empty()) {
    *ok = false;
    return 0.0;
  }
  double value = 0.0;
  if (TryNumber(cell, &value)) return EncodeBinaryNumber(cell, ok);
  return 0.0;
}

double EncodeRace(const std::string& cell, bool* ok) {
  *ok = true;
  if (cell == "African-American") return 1.0;
  if (cell == "?" || cell.empty()) {
    *ok = false;
    return 0.0;
  }
  double value = 0.0;
  if (TryNumber(cell, &value)) return EncodeBinaryNumber(cell, ok);
  return 0.0;
}

double EncodeLabel(const std::string& cell, bool* ok) {
  *ok = true;
  if (cell == ">50K" || cell == ">50K.") return 1.0;
  if (cell == "<=50K" || cell == "<=50K.") return -1.0;
  double value = 0.0;
  if (TryNumber(cell, &value)) {
    if (value == 1.0) return 1.0;
    if (value == 0.0 || value == -1.0) return -1.0;
  }
  *ok = false;
  return 0.0;
}

struct ColumnRule {
  std::string name;
  bool sensitive;
  Encoder encode;
};

Dataset BuildDataset(const CsvTable& table, const std::vector<ColumnRule>& rules,
                     const std::string& label, const std::string& source) {
  Dataset data;
  data.source = source;
  std::vector<int> index;
  for (const auto& rule : rules) {
    data.columns.push_back({rule.name, rule.sensitive});
    index.push_back(table.Column(rule.name));
  }
  const int label_index = table.Column(label);
  const long n = static_cast<long>(table.rows.size());
  data.features.resize(n, static_cast<long>(rules.size()));
  data.labels.resize(n);
  for (long r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    for (size_t j = 0; j < rules.size(); ++j) {
      bool ok = false;
      const std::string& cell = row[index[j]];
      data.features(r, static_cast<long>(j)) = rules[j].encode(cell, &ok);
      if (!ok) BadCell(r, rules[j].name, cell);
    }
    bool ok = false;
    data.labels[r] = EncodeLabel(row[label_index], &ok);
    if (!ok) BadCell(r, label, row[label_index]);
  }
  return data;
}

}  // namespace

std::vector<int> Dataset::SensitiveIndices() const {
  std::vector<int> out;
  for (size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].sensitive) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<std::string> Dataset::ColumnNames() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

double Dataset::PositiveRate() const {
  if (labels.size() == 0) return 0.0;
  return (labels.array() > 0).cast<double>().mean();
}

void Dataset::Validate() const {
  CheckDimension(features.cols(), static_cast<long>(columns.size()), "feature columns");
  CheckDimension(labels.size(), features.rows(), "label count");
  if (!features.allFinite()) throw SchemaError("dataset has non-finite features");
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) throw SchemaError("dataset labels must be -1 or +1");
  }
}

Dataset Subset(const Dataset& data, const std::vector<long>& rows) {
  Dataset out;
  out.columns = data.columns;
  out.source = data.source;
  out.seed = data.seed;
  out.standardization = data.standardization;
  out.features.resize(static_cast<long>(rows.size()), data.features.cols());
  out.labels.resize(static_cast<long>(rows.size()));
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= data.size()) throw DimensionError("row index out of range");
    out.features.row(static_cast<long>(k)) = data.features.row(rows[k]);
    out.labels[static_cast<long>(k)] = data.labels[rows[k]];
  }
  return out;
}

Scm LinScm() {
  std::vector<ScmNode> nodes(3);
  nodes[0] = {"A", {}, StructuralEquation(), ExogenousSpec::Bernoulli(0.5)};
  nodes[1] = {"X1", {0}, StructuralEquation::Linear({2.0}), ExogenousSpec::Normal(0, 1)};
  nodes[2] = {"X2", {0, 1}, StructuralEquation::Linear({1.0, -1.0}),
              ExogenousSpec::Normal(0, 1)};
  return Scm(std::move(nodes), {0});
}

namespace {

SyntheticData Draw(Scm scm, int n, uint64_t seed, const std::string& source,
                   double (*label_score)(const Vector& v)) {
  if (n < 1) throw Error("sample size must be at least 1");
  std::mt19937_64 rng(seed);
  SampleTable table = Sample(scm, n, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data;
  data.source = source;
  data.seed = seed;
  for (const auto& node : scm.nodes()) data.columns.push_back({node.name, false});
  for (int s : scm.sensitive()) data.columns[s].sensitive = true;
  data.features = table.features;
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double prob = Sigmoid(label_score(table.features.row(i).transpose()));
    data.labels[i] = unit(rng) < prob ? 1.0 : -1.0;
  }
  return {std::move(scm), std::move(data)};
}

}  // namespace

SyntheticData GenerateLin(int n, uint64_t seed) {
  return Draw(LinScm(), n, seed, "lin", [](const Vector& v) { return v[1] + v[2]; });
}

Scm GenerateExample1(Example1Model which) {
  std::vector<ScmNode> nodes(3);
  nodes[0] = {"G", {}, StructuralEquation(), ExogenousSpec::Bernoulli(0.5)};
  if (which == Example1Model::kIndependent) {
    nodes[1] = {"E", {}, StructuralEquation(), ExogenousSpec::Normal(0, 1)};
    nodes[2] = {"I", {}, StructuralEquation(), ExogenousSpec::Normal(0, 1)};
  } else {
    nodes[1] = {"E", {0}, StructuralEquation::Linear({1.0}), ExogenousSpec::Normal(0, 1)};
    nodes[2] = {"I", {0, 1}, StructuralEquation::Linear({1.0, 2.0}),
                ExogenousSpec::Normal(0, 1)};
  }
  return Scm(std::move(nodes), {0});
}

SyntheticData GenerateExample1Data(Example1Model which, int n, uint64_t seed) {
  return Draw(GenerateExample1(which), n, seed, "example1",
              [](const Vector& v) { return v[2] - 2.0 * v[1]; });
}

CausalGraph LinGraph() {
  return {{"A", "X1", "X2"}, {{}, {"A"}, {"A", "X1"}}, {"A"}};
}

CausalGraph AdultGraph() {
  const std::vector<std::string> roots = {"sex", "age", "native-country", "marital-status"};
  std::vector<std::string> edu_parents = roots;
  std::vector<std::string> hours_parents = roots;
  hours_parents.push_back("education-num");
  return {{"sex", "age", "native-country", "marital-status", "education-num",
           "hours-per-week"},
          {{}, {}, {}, {}, edu_parents, hours_parents},
          {"sex"}};
}

CausalGraph CompasGraph() {
  return {{"sex", "age", "race", "priors_count"},
          {{}, {}, {}, {"sex", "age", "race"}},
          {"sex"}};
}

CausalGraph GraphOf(const Scm& scm) {
  CausalGraph graph;
  graph.nodes = scm.names();
  for (const auto& node : scm.nodes()) {
    std::vector<std::string> parents;
    for (int p : node.parents) parents.push_back(scm.node(p).name);
    graph.parents.push_back(std::move(parents));
  }
  for (int s : scm.sensitive()) graph.sensitive.push_back(scm.node(s).name);
  return graph;
}

Scm FitLinearScm(const Dataset& data, const CausalGraph& graph) {
  data.Validate();
  if (graph.parents.size() != graph.nodes.size()) {
    throw ScmError("graph parent lists do not match its node list");
  }
  if (data.ColumnNames() != graph.nodes) {
    throw ScmError("dataset columns do not match the graph nodes");
  }
  std::map<std::string, int> index;
  for (size_t i = 0; i < graph.nodes.size(); ++i) index[graph.nodes[i]] = static_cast<int>(i);
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw ScmError("graph names unknown node '" + name + "'");
    return it->second;
  };
  std::vector<int> sensitive;
  for (const auto& s : graph.sensitive) sensitive.push_back(lookup(s));

  const long n = data.size();
  std::vector<ScmNode> nodes(graph.nodes.size());
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    ScmNode& node = nodes[i];
    node.name = graph.nodes[i];
    const Vector column = data.features.col(static_cast<long>(i));
    const bool is_sensitive =
        std::find(sensitive.begin(), sensitive.end(), static_cast<int>(i)) != sensitive.end();
    if (graph.parents[i].empty()) {
      const double mean = column.mean();
      const double var = (column.array() - mean).square().mean();
      const bool binary = ((column.array() == 0.0) || (column.array() == 1.0)).all();
      node.exogenous = is_sensitive && binary ? ExogenousSpec::Bernoulli(mean)
                                              : ExogenousSpec::Normal(mean, var);
      continue;
    }
    const long k = static_cast<long>(graph.parents[i].size());
    Matrix design(n, k + 1);
    for (long j = 0; j < k; ++j) {
      const int p = lookup(graph.parents[i][j]);
      node.parents.push_back(p);
      design.col(j) = data.features.col(p);
    }
    design.col(k).setOnes();
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < k + 1) {
      throw ScmError("rank-deficient design for the equation of '" + node.name + "'");
    }
    const Vector beta = qr.solve(column);
    node.equation = StructuralEquation::Linear(
        std::vector<double>(beta.data(), beta.data() + k));
    const Vector residual = column - design * beta;
    node.exogenous = ExogenousSpec::Normal(
        beta[k], residual.squaredNorm() / static_cast<double>(n));
  }
  return Scm(std::move(nodes), std::move(sensitive));
}

Dataset LoadCsv(const std::string& path, const std::string& schema) {
  const CsvTable table = ReadCsv(path);
  Dataset data;
  if (schema == "adult") {
    data = BuildDataset(table,
                        {{"sex", true, EncodeSex},
                         {"age", false, EncodeReal},
                         {"native-country", false, EncodeCountry},
                         {"marital-status", false, EncodeMarital},
                         {"education-num", false, EncodeReal},
                         {"hours-per-week", false, EncodeReal}},
                        "income", "adult");
  } else if (schema == "compas") {
    data = BuildDataset(table,
                        {{"sex", true, EncodeSex},
                         {"age", false, EncodeReal},
                         {"race", false, EncodeRace},
                         {"priors_count", false, EncodeReal}},
                        "two_year_recid", "compas");
  } else if (schema.starts_with("custom:")) {
    const ScmDocument doc = LoadScmFile(schema.substr(7));
    std::vector<ColumnRule> rules;
    for (int i = 0; i < doc.scm.size(); ++i) {
      rules.push_back({doc.scm.node(i).name, doc.scm.is_sensitive(i), EncodeReal});
    }
    data = BuildDataset(table, rules, doc.label, "custom");
  } else {
    throw SchemaError("unknown CSV schema '" + schema +
                      "' (expected adult, compas or custom:<scm.json>)");
  }
  data.Validate();
  return data;
}

void WriteCsv(const Dataset& data, const std::string& path, const std::string& label_name) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw Error("cannot write '" + path + "'");
  for (const auto& c : data.columns) std::fprintf(out, "%s,", c.name.c_str());
  std::fprintf(out, "%s\n", label_name.c_str());
  for (long i = 0; i < data.size(); ++i) {
    for (long j = 0; j < data.features.cols(); ++j) {
      std::fprintf(out, "%.17g,", data.features(i, j));
    }
    std::fprintf(out, "%d\n", data.labels[i] > 0 ? 1 : -1);
  }
  std::fclose(out);
}

Standardization FitStandardization(const Dataset& data) {
  if (data.size() == 0) throw SchemaError("cannot standardize an empty dataset");
  Standardization params;
  params.fitted = true;
  for (long j = 0; j < data.features.cols(); ++j) {
    if (data.columns[j].sensitive) {
      params.mean.push_back(0.0);
      params.scale.push_back(1.0);
      continue;
    }
    const auto col = data.features.col(j).array();
    const double mean = col.mean();
    const double sd = std::sqrt((col - mean).square().mean());
    if (!(sd > 0.0)) {
      throw SchemaError("column '" + data.columns[j].name + "' has zero variance");
    }
    params.mean.push_back(mean);
    params.scale.push_back(sd);
  }
  return params;
}

Dataset ApplyStandardization(const Dataset& data, const Standardization& params) {
  CheckDimension(static_cast<long>(params.mean.size()), data.features.cols(),
                 "standardization parameters");
  Dataset out = data;
  for (long j = 0; j < out.features.cols(); ++j) {
    out.features.col(j) =
        ((out.features.col(j).array() - params.mean[j]) / params.scale[j]).matrix();
  }
  out.standardization = params;
  return out;
}

Dataset Standardize(const Dataset& data) {
  return ApplyStandardization(data, FitStandardization(data));
}

Dataset Unstandardize(const Dataset& data) {
  if (!data.standardization.fitted) return data;
  Dataset out = data;
  const auto& params = data.standardization;
  for (long j = 0; j < out.features.cols(); ++j) {
    out.features.col(j) = (out.features.col(j).array() * params.scale[j] + params.mean[j]).matrix();
  }
  out.standardization = Standardization{};
  return out;
}

Split StratifiedSplit(const Dataset& data, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> to_test(static_cast<size_t>(data.size()), false);
  for (double label : {-1.0, 1.0}) {
    std::vector<long> rows;
    for (long i = 0; i < data.size(); ++i) {
      if (data.labels[i] == label) rows.push_back(i);
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const size_t take = static_cast<size_t>(std::llround(test_fraction * rows.size()));
    for (size_t k = 0; k < take; ++k) to_test[rows[k]] = true;
  }
  std::vector<long> train, test;
  for (long i = 0; i < data.size(); ++i) (to_test[i] ? test : train).push_back(i);
  if (train.empty() || test.empty()) throw Error("split leaves one side empty");
  return {Subset(data, train), Subset(data, test)};
}

}  // namespace cfdro
