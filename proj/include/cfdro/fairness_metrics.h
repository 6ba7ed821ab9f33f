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

#ifndef CFDRO_FAIRNESS_METRICS_H_
#define CFDRO_FAIRNESS_METRICS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfdro/dataset.h"
#include "cfdro/fair_metric.h"
#include "cfdro/losses.h"
#include "cfdro/parallel.h"
#include "cfdro/scm.h"

namespace cfdro {

// +1 when theta^T v + b > 0, else -1.
int Predict(const ModelParams& params, const Vector& v);

double Accuracy(const ModelParams& params, const Dataset& data);

// Share of points whose prediction flips for some twin.
double CounterfactualUnfairness(const ModelParams& params, const Scm& scm,
                                const Dataset& data, std::vector<Vector> levels = {});

// Share of points with a prediction flip inside the radius, searched over
// every twin (unfair area) or over the point's own level only (non-robust
// area). Closed form for linear SCMs: scores move by at most
// radius * ||P_X(M^T theta)||_*, and a score landing exactly on the
// threshold counts as a flip.
double UnfairArea(const ModelParams& params, const CfdfMetric& metric, const Dataset& data,
                  double radius, std::vector<Vector> levels = {},
                  Execution execution = Execution::kParallel);
double NonrobustArea(const ModelParams& params, const CfdfMetric& metric, const Dataset& data,
                     double radius, Execution execution = Execution::kParallel);

// Per-point flags behind the two areas above.
std::vector<char> UnfairFlags(const ModelParams& params, const CfdfMetric& metric,
                              const Dataset& data, double radius, bool own_level_only,
                              std::vector<Vector> levels = {},
                              Execution execution = Execution::kParallel);

// Search over twins and `budget` shifts per twin: the local dual-norm
// maximizer, +-axes, then seeded draws inside the ball. Works for nonlinear
// SCMs and never reports more than the closed form.
std::vector<char> UnfairFlagsSampled(const ModelParams& params, const CfdfMetric& metric,
                                     const Dataset& data, double radius, int budget,
                                     uint64_t seed, std::vector<Vector> levels = {});
double UnfairAreaSampled(const ModelParams& params, const CfdfMetric& metric,
                         const Dataset& data, double radius, int budget, uint64_t seed,
                         std::vector<Vector> levels = {});

struct MetricsReport {
  double accuracy = 0.0;
  std::map<double, double> unfair;     // radius -> U
  std::map<double, double> nonrobust;  // radius -> R
  double counterfactual = 0.0;
  uint64_t seed = 0;
  std::string trainer;
  std::string dataset;
};

MetricsReport EvaluateMetrics(const ModelParams& params, const CfdfMetric& metric,
                              const Dataset& data, const std::vector<double>& radii,
                              Execution execution = Execution::kParallel);

}  // namespace cfdro

#endif  // CFDRO_FAIRNESS_METRICS_H_
