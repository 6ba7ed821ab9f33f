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

#ifndef CFDRO_DATASET_H_
#define CFDRO_DATASET_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfdro/scm.h"

namespace cfdro {

struct Column {
  std::string name;
  bool sensitive = false;
};

// Per-column affine map x -> (x - mean) / scale. Sensitive columns keep
// mean 0 and scale 1.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;
  bool fitted = false;
};

struct Dataset {
  std::vector<Column> columns;
  Matrix features;  // one row per observation
  Vector labels;    // -1 or +1
  std::string source;
  uint64_t seed = 0;
  Standardization standardization;

  long size() const { return features.rows(); }
  int dimension() const { return static_cast<int>(columns.size()); }
  std::vector<int> SensitiveIndices() const;
  std::vector<std::string> ColumnNames() const;
  Vector Row(long i) const { return features.row(i).transpose(); }
  // Fraction of +1 labels; recorded, never enforced.
  double PositiveRate() const;
  void Validate() const;
};

Dataset Subset(const Dataset& data, const std::vector<long>& rows);

struct SyntheticData {
  Scm scm;
  Dataset data;
};

// A ~ B(0.5), X1 = 2A + U1, X2 = A - X1 + U2, Y ~ B(sigmoid(X1 + X2)).
Scm LinScm();
SyntheticData GenerateLin(int n, uint64_t seed);

enum class Example1Model { kIndependent, kLinear };

// Gender, education, income. The first model keeps the three independent;
// the second has E = G + U_E and I = G + 2E + U_I.
Scm GenerateExample1(Example1Model which);
// Rows drawn from the chosen model with Y ~ B(sigmoid(I - 2E)).
SyntheticData GenerateExample1Data(Example1Model which, int n, uint64_t seed);

// Parent lists by column name. Nodes without parents are roots.
struct CausalGraph {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::string>> parents;
  std::vector<std::string> sensitive;
};

CausalGraph LinGraph();
CausalGraph AdultGraph();
CausalGraph CompasGraph();
CausalGraph GraphOf(const Scm& scm);

// Least squares of each child on its parents with an intercept. The
// intercept and residual variance become the exogenous normal; sensitive
// roots become Bernoulli at their empirical rate. The dataset columns must
// carry the graph's node names in the same order.
Scm FitLinearScm(const Dataset& data, const CausalGraph& graph);

// CSV with a header row. Schemas: "adult", "compas", "custom:<scm.json>".
Dataset LoadCsv(const std::string& path, const std::string& schema);
void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& label_name = "y");

// Fits mean and population std on the non-sensitive columns.
Standardization FitStandardization(const Dataset& data);
Dataset ApplyStandardization(const Dataset& data, const Standardization& params);
Dataset Standardize(const Dataset& data);
Dataset Unstandardize(const Dataset& data);

struct Split {
  Dataset train;
  Dataset test;
};

// Per label, a seeded shuffle sends round(test_fraction * count) rows to the
// test side. Row order inside each side follows the source.
Split StratifiedSplit(const Dataset& data, double test_fraction, uint64_t seed);

}  // namespace cfdro

#endif  // CFDRO_DATASET_H_
