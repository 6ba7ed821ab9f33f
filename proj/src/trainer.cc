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

#include "cfdro/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cfdro/error.h"

namespace cfdro {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

void CheckFinite(double value, int epoch) {
  if (std::isnan(value)) {
    throw TrainingError("objective became NaN at epoch " + std::to_string(epoch));
  }
}

}  // namespace

ModelParams InitialParams(int dimension) {
  ModelParams params;
  params.theta = Vector::Zero(dimension);
  params.intercept = 0.0;
  return params;
}

TrainResult Train(const Dataset& data, const Scm& scm, const TrainerConfig& cfg) {
  const Objective objective(data, scm, cfg);
  return Train(objective);
}

TrainResult Train(const Objective& objective) {
  const TrainerConfig& cfg = objective.config();
  const int dim = objective.dimension();
  TrainResult result;
  result.params = InitialParams(dim);
  objective.Constrain(&result.params);

  // Shuffling uses its own stream so the initial draw stays fixed.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<long> order(static_cast<size_t>(objective.size()));
  std::iota(order.begin(), order.end(), 0L);

  Vector m = Vector::Zero(dim + 1);
  Vector v = Vector::Zero(dim + 1);
  const double lr = cfg.optimizer.learning_rate;
  const size_t batch = static_cast<size_t>(cfg.optimizer.batch_size);

  double value = objective.Value(result.params);
  CheckFinite(value, 0);
  result.trace.push_back(value);
  for (int epoch = 1; epoch <= cfg.optimizer.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t stop = std::min(order.size(), start + batch);
      const std::span<const long> rows(order.data() + start, stop - start);
      const Vector g = objective.Gradient(result.params, rows);
      if (!g.allFinite()) {
        throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch));
      }
      ++result.steps;
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(result.steps));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(result.steps));
      const Vector step =
          (lr * (m / c1).array() / ((v / c2).array().sqrt() + kEpsilon)).matrix();
      result.params.theta -= step.head(dim);
      result.params.intercept -= step[dim];
      objective.Constrain(&result.params);
    }
    value = objective.Value(result.params);
    CheckFinite(value, epoch);
    result.trace.push_back(value);
  }
  return result;
}

}  // namespace cfdro
