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

#include "cfdro/fairness_metrics.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "cfdro/error.h"
#include "cfdro/objectives.h"

namespace cfdro {
namespace {

void CheckData(const Dataset& data, const Scm& scm) {
  if (data.size() == 0) throw Error("metrics need a nonempty dataset");
  CheckDimension(data.dimension(), scm.size(), "dataset columns");
}

double Fraction(const std::vector<char>& flags) {
  long count = 0;
  for (char f : flags) count += f ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

// Twins of v plus v itself (which matters when v's level is not listed).
std::vector<Vector> Candidates(const Scm& scm, const Vector& v,
                               const std::vector<Vector>& levels) {
  std::vector<Vector> out = Twins(scm, v, levels);
  out.push_back(v);
  return out;
}

template <typename Body>
void ForEachRow(long n, Execution execution, Body body) {
  if (execution == Execution::kParallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(MaxThreads())
    for (long i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

}  // namespace

int Predict(const ModelParams& params, const Vector& v) {
  return params.Score(v) > 0.0 ? 1 : -1;
}

double Accuracy(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) throw Error("accuracy needs a nonempty dataset");
  long hits = 0;
  for (long i = 0; i < data.size(); ++i) {
    hits += Predict(params, data.Row(i)) == static_cast<int>(data.labels[i]) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double CounterfactualUnfairness(const ModelParams& params, const Scm& scm, const Dataset& data,
                                std::vector<Vector> levels) {
  CheckData(data, scm);
  if (levels.empty()) levels = ObservedLevels(scm, data.features);
  long flips = 0;
  for (long i = 0; i < data.size(); ++i) {
    const Vector v = data.Row(i);
    const int own = Predict(params, v);
    bool flip = false;
    for (const auto& twin : Twins(scm, v, levels)) flip = flip || Predict(params, twin) != own;
    flips += flip ? 1 : 0;
  }
  return static_cast<double>(flips) / static_cast<double>(data.size());
}

std::vector<char> UnfairFlags(const ModelParams& params, const CfdfMetric& metric,
                              const Dataset& data, double radius, bool own_level_only,
                              std::vector<Vector> levels, Execution execution) {
  const Scm& scm = metric.scm();
  CheckData(data, scm);
  if (!(radius >= 0.0)) throw Error("radius must be nonnegative");
  if (!scm.is_linear()) {
    throw ScmError("closed-form areas need a linear SCM; use the sampled variant");
  }
  if (levels.empty()) levels = ObservedLevels(scm, data.features);
  const double reach =
      radius * LatentDualNorm(LinearMatrix(scm), scm, metric.norm(), params.theta);
  std::vector<char> flags(static_cast<size_t>(data.size()), 0);
  ForEachRow(data.size(), execution, [&](long i) {
    const Vector v = data.Row(i);
    const int own = Predict(params, v);
    const std::vector<Vector> points =
        own_level_only ? std::vector<Vector>{v} : Candidates(scm, v, levels);
    bool flip = false;
    for (const auto& point : points) {
      const double score = params.Score(point);
      flip = flip || (score > 0.0 ? 1 : -1) != own || (reach > 0.0 && std::abs(score) <= reach);
    }
    flags[i] = flip ? 1 : 0;
  });
  return flags;
}

double UnfairArea(const ModelParams& params, const CfdfMetric& metric, const Dataset& data,
                  double radius, std::vector<Vector> levels, Execution execution) {
  return Fraction(UnfairFlags(params, metric, data, radius, false, std::move(levels), execution));
}

double NonrobustArea(const ModelParams& params, const CfdfMetric& metric, const Dataset& data,
                     double radius, Execution execution) {
  return Fraction(UnfairFlags(params, metric, data, radius, true, {}, execution));
}

std::vector<char> UnfairFlagsSampled(const ModelParams& params, const CfdfMetric& metric,
                                     const Dataset& data, double radius, int budget,
                                     uint64_t seed, std::vector<Vector> levels) {
  const Scm& scm = metric.scm();
  CheckData(data, scm);
  if (budget < 1) throw Error("sampling budget must be at least 1");
  if (levels.empty()) levels = ObservedLevels(scm, data.features);
  const int nx = static_cast<int>(scm.nonsensitive().size());
  const NormSpec& norm = metric.norm();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<char> flags(static_cast<size_t>(data.size()), 0);
  for (long i = 0; i < data.size(); ++i) {
    const Vector v = data.Row(i);
    const int own = Predict(params, v);
    const Vector ux = NonsensitiveLatent(scm, v);
    bool flip = false;
    std::vector<Vector> bases = levels;
    bases.push_back(Vector());  // marker for v's own sensitive values
    for (const auto& level : bases) {
      Vector a = level;
      if (a.size() == 0) {
        a.resize(static_cast<long>(scm.sensitive().size()));
        for (size_t j = 0; j < scm.sensitive().size(); ++j) a[j] = v[scm.sensitive()[j]];
      }
      const Vector packed = PackSemiLatent(scm, a, ux);
      std::vector<Vector> shifts;
      if (radius > 0.0) {
        const Matrix jac = SemiLatentJacobian(scm, packed);
        const Vector s = norm.DualMaximizer(jac.transpose() * params.theta);
        if (s.squaredNorm() > 0.0) {
          shifts.push_back(radius * s);
          shifts.push_back(-radius * s);
        }
        for (int j = 0; j < nx; ++j) {
          Vector e = Vector::Zero(nx);
          e[j] = radius / norm.Norm(Vector::Unit(nx, j));
          shifts.push_back(e);
          shifts.push_back(-e);
        }
      }
      // Stops at the first flip.
      int tried = 0;
      auto flips = [&](const Vector& shift) {
        ++tried;
        Vector moved = packed;
        for (int j = 0; j < nx; ++j) moved[scm.nonsensitive()[j]] += shift[j];
        return Predict(params, SemiLatentInversePacked(scm, moved)) != own;
      };
      flip = flips(Vector::Zero(nx));
      for (size_t k = 0; !flip && k < shifts.size() && tried < budget; ++k) {
        flip = flips(shifts[k]);
      }
      while (!flip && radius > 0.0 && tried < budget) {
        Vector d(nx);
        for (int j = 0; j < nx; ++j) d[j] = normal(rng);
        const double length = norm.Norm(d);
        if (length == 0.0) continue;
        flip = flips(radius * std::pow(unit(rng), 1.0 / nx) * d / length);
      }
      if (flip) break;
    }
    flags[i] = flip ? 1 : 0;
  }
  return flags;
}

double UnfairAreaSampled(const ModelParams& params, const CfdfMetric& metric,
                         const Dataset& data, double radius, int budget, uint64_t seed,
                         std::vector<Vector> levels) {
  return Fraction(
      UnfairFlagsSampled(params, metric, data, radius, budget, seed, std::move(levels)));
}

MetricsReport EvaluateMetrics(const ModelParams& params, const CfdfMetric& metric,
                              const Dataset& data, const std::vector<double>& radii,
                              Execution execution) {
  MetricsReport report;
  report.accuracy = Accuracy(params, data);
  const auto levels = ObservedLevels(metric.scm(), data.features);
  report.counterfactual = UnfairArea(params, metric, data, 0.0, levels, execution);
  for (double r : radii) {
    report.unfair[r] = UnfairArea(params, metric, data, r, levels, execution);
    report.nonrobust[r] = NonrobustArea(params, metric, data, r, execution);
  }
  return report;
}

}  // namespace cfdro
