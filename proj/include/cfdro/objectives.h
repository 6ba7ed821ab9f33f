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

#ifndef CFDRO_OBJECTIVES_H_
#define CFDRO_OBJECTIVES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfdro/dataset.h"
#include "cfdro/losses.h"
#include "cfdro/norm.h"
#include "cfdro/scm.h"

namespace cfdro {

enum class TrainerKind { kErm, kAdversarial, kRoss, kCdroClosed, kCdroFirstOrder };
enum class ConstraintMode { kFiniteLevels, kNullspace };

std::string TrainerKindName(TrainerKind kind);
TrainerKind ParseTrainerKind(const std::string& name);

struct OptimizerConfig {
  double learning_rate = 1e-3;
  int batch_size = 100;
  int epochs = 10;
};

// `power` is the transport order. The closed and first-order objectives
// apply it themselves and ignore loss.power(); the baselines use
// loss.power() as the exponent on the loss.
struct TrainerConfig {
  TrainerKind kind = TrainerKind::kErm;
  std::string label;  // display name; defaults to the kind name
  double delta = 0.0;
  double power = 1.0;
  NormSpec norm;
  LossSpec loss = LossSpec(LossFamily::kLogExponential);
  OptimizerConfig optimizer;
  uint64_t seed = 0;
  ConstraintMode constraint_mode = ConstraintMode::kFiniteLevels;

  std::string DisplayName() const;
  void Validate() const;
};

// Distinct sensitive assignments seen in the rows, sorted.
std::vector<Vector> ObservedLevels(const Scm& scm, const Matrix& features);

// Twins of every row, computed once. points[i] has one row per level.
struct TwinSet {
  std::vector<Vector> levels;
  std::vector<Matrix> points;
  std::vector<int> own_level;  // level index of the row itself, or -1

  static TwinSet Build(const Scm& scm, const Matrix& features,
                       std::vector<Vector> levels);
  long size() const { return static_cast<long>(points.size()); }
};

// Highest-loss twin; ties go to the lowest level index.
int WorstTwin(const TwinSet& twins, long i, const LossSpec& loss, double y,
              const ModelParams& params);

// (1/N) sum_i max_a h(t(twin_a))^p.
double CfSupRisk(const TwinSet& twins, const Vector& labels, const LossSpec& loss,
                 const ModelParams& params, double p);

// Dual norm of the non-sensitive block of M^T theta.
double LatentDualNorm(const Matrix& m, const Scm& scm, const NormSpec& norm,
                      const Vector& theta);

double ErmObjective(const Dataset& data, const ModelParams& params, const LossSpec& loss);
double CdroClosedObjective(const Dataset& data, const Scm& scm, const ModelParams& params,
                           const TrainerConfig& cfg);
double CdroFirstOrderObjective(const Dataset& data, const Scm& scm,
                               const ModelParams& params, const TrainerConfig& cfg);
double AdversarialObjective(const Dataset& data, const ModelParams& params,
                            const TrainerConfig& cfg);
double RossObjective(const Dataset& data, const ModelParams& params,
                     const TrainerConfig& cfg);

// Gradient of u_x -> h(t(g^{-1}(a, u_x))) at the point, over the
// non-sensitive latent coordinates.
Vector CfGradient(const Scm& scm, const Vector& v, double y, const ModelParams& params,
                  const LossSpec& loss);

// Euclidean projection onto { theta : P_A(M^T theta) = 0 }.
Vector ProjectNullspace(const Vector& theta, const Matrix& m,
                        std::span<const int> sensitive);

// A training objective bound to a dataset, with value and gradient on
// arbitrary row subsets. Gradients carry the intercept last.
class Objective {
 public:
  Objective(const Dataset& data, const Scm& scm, TrainerConfig cfg,
            std::vector<Vector> levels = {});

  const TrainerConfig& config() const { return cfg_; }
  const TwinSet& twins() const { return twins_; }
  long size() const { return data_->size(); }
  int dimension() const { return data_->dimension(); }

  double Value(const ModelParams& params) const;
  double Value(const ModelParams& params, std::span<const long> rows) const;
  Vector Gradient(const ModelParams& params) const;
  Vector Gradient(const ModelParams& params, std::span<const long> rows) const;

  // Applied after every optimizer step; projects in nullspace mode.
  void Constrain(ModelParams* params) const;

 private:
  double Evaluate(const ModelParams& params, std::span<const long> rows,
                  Vector* gradient) const;
  double Erm(const ModelParams& params, std::span<const long> rows, Vector* g) const;
  double Closed(const ModelParams& params, std::span<const long> rows, Vector* g) const;
  double FirstOrder(const ModelParams& params, std::span<const long> rows, Vector* g) const;
  double Perturbed(const ModelParams& params, std::span<const long> rows, Vector* g) const;
  // Twin risk mean_i max_a h^p and its gradient.
  double TwinRisk(const ModelParams& params, std::span<const long> rows, double p,
                  Vector* g) const;

  const Dataset* data_;
  const Scm* scm_;
  TrainerConfig cfg_;
  TwinSet twins_;
  Matrix latent_map_;  // M restricted to non-sensitive columns (linear only)
  Matrix matrix_;      // full M (linear only)
  // d g^{-1} / d u_x per row and level (first-order on nonlinear models).
  std::vector<std::vector<Matrix>> jacobians_;
  std::vector<int> features_;  // non-sensitive columns
  std::vector<long> all_rows_;
};

}  // namespace cfdro

#endif  // CFDRO_OBJECTIVES_H_
