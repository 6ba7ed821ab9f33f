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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfdro/dataset.h"
#include "cfdro/error.h"
#include "cfdro/fairness_metrics.h"
#include "cfdro/objectives.h"
#include "cfdro/trainer.h"
#include "test_util.h"

namespace cfdro {
namespace {

using testing::ExpectNear;
using testing::Points;
using testing::Vec;

const Scm kLin = LinScm();

Dataset OnePoint(const Vector& v, double y = 1.0) {
  return Points(kLin, v.transpose(), Vec({y}));
}

TrainerConfig Config(TrainerKind kind, double delta, LossFamily family = LossFamily::kHinge) {
  TrainerConfig cfg;
  cfg.kind = kind;
  cfg.delta = delta;
  cfg.loss = LossSpec(family);
  cfg.norm = NormSpec::L1();
  return cfg;
}

ModelParams Params(const Vector& theta, double b = 0.0) { return {theta, b}; }

double ClosedValue(const Dataset& data, const ModelParams& params, const TrainerConfig& cfg) {
  return Objective(data, kLin, cfg, IntegerLevels(2)).Value(params);
}

TEST(CfSupRisk, WorstTwinOfOnePoint) {
  const Dataset data = OnePoint(Vec({1, 3, 0}));
  const TwinSet twins = TwinSet::Build(kLin, data.features, IntegerLevels(2));
  const LossSpec hinge(LossFamily::kHinge);
  EXPECT_EQ(CfSupRisk(twins, data.labels, hinge, Params(Vec({0, 1, 0})), 1.0), 0.0);
  EXPECT_NEAR(CfSupRisk(twins, data.labels, hinge, Params(Vec({0, 0.4, 0})), 1.0), 0.6, 1e-12);
  EXPECT_EQ(CfSupRisk(twins, data.labels, hinge, Params(Vec({0, 0, 0})), 1.0), 1.0);
}

TEST(CfSupRisk, OwnTwinIsTheObservedRow) {
  const Dataset data = OnePoint(Vec({1, 3, 0}));
  const TwinSet twins = TwinSet::Build(kLin, data.features, IntegerLevels(2));
  EXPECT_EQ(twins.own_level[0], 1);
  EXPECT_EQ(Vector(twins.points[0].row(1).transpose()), data.Row(0));
}

TEST(ClosedForm, OnePointValue) {
  const Dataset data = OnePoint(Vec({1, 3, 0}));
  EXPECT_NEAR(ClosedValue(data, Params(Vec({0, 1, 0})), Config(TrainerKind::kCdroClosed, 0.1)),
              0.1, 1e-12);
}

TEST(ClosedForm, ZeroRadiusIsTwinRisk) {
  const SyntheticData lin = GenerateLin(40, 3);
  const ModelParams params = Params(Vec({0.2, -0.5, 0.7}), 0.1);
  for (double p : {1.0, 2.0}) {
    TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.0);
    cfg.power = p;
    const TwinSet twins = TwinSet::Build(kLin, lin.data.features, IntegerLevels(2));
    EXPECT_NEAR(ClosedValue(lin.data, params, cfg),
                CfSupRisk(twins, lin.data.labels, cfg.loss, params, p), 1e-12);
  }
}

TEST(ClosedForm, ZeroModelCostsOne) {
  const SyntheticData lin = GenerateLin(30, 1);
  for (double p : {1.0, 2.0, 3.0}) {
    TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.3);
    cfg.power = p;
    EXPECT_NEAR(ClosedValue(lin.data, Params(Vec({0, 0, 0})), cfg), 1.0, 1e-12);
  }
}

// Larger radius never lowers the bound, and the bound dominates both the
// twin risk and the plain empirical risk.
TEST(ClosedForm, OrderedAndMonotone) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  const SyntheticData lin = GenerateLin(60, 9);
  const TwinSet twins = TwinSet::Build(kLin, lin.data.features, IntegerLevels(2));
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams params = Params(Vec({normal(rng), normal(rng), normal(rng)}), normal(rng));
    for (double p : {1.0, 2.0}) {
      double previous = -1.0;
      for (double delta : {0.0, 0.01, 0.1, 0.5, 2.0}) {
        TrainerConfig cfg = Config(TrainerKind::kCdroClosed, delta);
        cfg.power = p;
        const double value = ClosedValue(lin.data, params, cfg);
        EXPECT_GE(value, previous);
        previous = value;
        LossSpec pow_loss = cfg.loss;
        pow_loss.set_power(p);
        const double twin = CfSupRisk(twins, lin.data.labels, cfg.loss, params, p);
        EXPECT_GE(value, twin - 1e-12);
        EXPECT_GE(twin, ErmObjective(lin.data, params, pow_loss) - 1e-12);
      }
    }
  }
}

TEST(ClosedForm, FreeFunctionMatchesObjective) {
  const SyntheticData lin = GenerateLin(30, 2);
  const ModelParams params = Params(Vec({0.1, 0.4, -0.3}));
  const TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.2);
  EXPECT_NEAR(CdroClosedObjective(lin.data, kLin, params, cfg),
              Objective(lin.data, kLin, cfg).Value(params), 1e-15);
}

TEST(ClosedForm, GradientMatchesFiniteDifferences) {
  const SyntheticData lin = GenerateLin(25, 4);
  const ModelParams base = Params(Vec({0.3, -0.2, 0.45}), 0.05);
  for (double p : {1.0, 2.0}) {
    TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.15, LossFamily::kLogExponential);
    cfg.power = p;
    if (p != 1.0) cfg.loss = LossSpec(LossFamily::kAbsolute).set_mode(LossMode::kClassification);
    const Objective objective(lin.data, kLin, cfg, IntegerLevels(2));
    const Vector g = objective.Gradient(base);
    for (long k = 0; k < 4; ++k) {
      ModelParams up = base, down = base;
      const double h = 1e-6;
      if (k < 3) {
        up.theta[k] += h;
        down.theta[k] -= h;
      } else {
        up.intercept += h;
        down.intercept -= h;
      }
      EXPECT_NEAR(g[k], (objective.Value(up) - objective.Value(down)) / (2 * h), 1e-5)
          << "order " << p << " coordinate " << k;
    }
  }
}

TEST(FirstOrder, ZeroRadiusIsTwinRisk) {
  const SyntheticData lin = GenerateLin(30, 6);
  const ModelParams params = Params(Vec({0.4, 0.1, -0.3}));
  TrainerConfig cfg = Config(TrainerKind::kCdroFirstOrder, 0.0, LossFamily::kLogExponential);
  cfg.power = 2.0;
  const TwinSet twins = TwinSet::Build(kLin, lin.data.features, IntegerLevels(2));
  EXPECT_NEAR(Objective(lin.data, kLin, cfg, IntegerLevels(2)).Value(params),
              CfSupRisk(twins, lin.data.labels, cfg.loss, params, 1.0), 1e-12);
}

TEST(FirstOrder, ZeroModelHasNoCorrection) {
  const SyntheticData lin = GenerateLin(30, 6);
  TrainerConfig cfg = Config(TrainerKind::kCdroFirstOrder, 0.4, LossFamily::kLogExponential);
  cfg.power = 2.0;
  EXPECT_NEAR(CdroFirstOrderObjective(lin.data, kLin, Params(Vec({0, 0, 0})), cfg),
              std::log(2.0), 1e-12);
}

TEST(FirstOrder, RejectsUnsupportedSettings) {
  TrainerConfig cfg = Config(TrainerKind::kCdroFirstOrder, 0.1, LossFamily::kLogExponential);
  cfg.power = 1.0;
  EXPECT_THROW(cfg.Validate(), TrainingError);
  cfg.power = 2.0;
  cfg.loss = LossSpec(LossFamily::kHinge);
  EXPECT_THROW(cfg.Validate(), TrainingError);
  TrainerConfig closed = Config(TrainerKind::kCdroClosed, 0.1, LossFamily::kLogExponential);
  closed.power = 2.0;
  EXPECT_THROW(closed.Validate(), TrainingError);
  closed.delta = -1.0;
  EXPECT_THROW(closed.Validate(), SchemaError);
}

TEST(CfGradient, LinearModelPullsBackTheta) {
  const LossSpec loss(LossFamily::kLogExponential);
  const Vector v = Vec({1, 0.5, -0.2});
  const ModelParams params = Params(Vec({0.3, -0.7, 1.1}), 0.2);
  const double t = loss.Margin(params.Score(v), -1.0);
  const Vector pulled = LinearMatrix(kLin).transpose() * params.theta;
  ExpectNear(CfGradient(kLin, v, -1.0, params, loss),
             loss.HDerivative(t) * -1.0 * pulled.tail(2), 1e-12);
  ExpectNear(CfGradient(kLin, v, 1.0, Params(Vec({0, 0, 0})), loss), Vec({0, 0}), 0.0);
}

TEST(Adversarial, PerturbationExamples) {
  TrainerConfig cfg = Config(TrainerKind::kAdversarial, 1.0);
  EXPECT_EQ(AdversarialObjective(OnePoint(Vec({1, 3, 0})), Params(Vec({0, 1, 0})), cfg), 0.0);
  cfg.delta = 0.5;
  EXPECT_NEAR(AdversarialObjective(OnePoint(Vec({1, 1.2, 0})), Params(Vec({0, 1, 0})), cfg),
              0.3, 1e-12);
}

TEST(Adversarial, SensitiveCoefficientIsNotPerturbed) {
  const TrainerConfig cfg = Config(TrainerKind::kAdversarial, 10.0);
  EXPECT_EQ(AdversarialObjective(OnePoint(Vec({3, 0, 0})), Params(Vec({1, 0, 0})), cfg), 0.0);
}

TEST(Adversarial, ZeroRadiusIsEmpiricalRisk) {
  const SyntheticData lin = GenerateLin(30, 8);
  const ModelParams params = Params(Vec({0.3, 0.6, 0.2}), -0.1);
  EXPECT_NEAR(AdversarialObjective(lin.data, params, Config(TrainerKind::kAdversarial, 0.0)),
              ErmObjective(lin.data, params, LossSpec(LossFamily::kHinge)), 1e-12);
}

TEST(Ross, PerturbationExamples) {
  const TrainerConfig cfg = Config(TrainerKind::kRoss, 1.0);
  // First term 0.5, second term reaches the hinge's flat part.
  EXPECT_NEAR(RossObjective(OnePoint(Vec({1, 0.5, 0})), Params(Vec({0, 1, 0})), cfg), 0.5,
              1e-12);
  EXPECT_EQ(RossObjective(OnePoint(Vec({1, 0.5, 0})), Params(Vec({0, 0, 0})), cfg), 2.0);
}

TEST(Ross, ZeroRadiusAddsPositiveLabelLoss) {
  const SyntheticData lin = GenerateLin(30, 8);
  const ModelParams params = Params(Vec({0.3, 0.6, 0.2}), -0.1);
  Dataset positive = lin.data;
  positive.labels.setOnes();
  const LossSpec hinge(LossFamily::kHinge);
  EXPECT_NEAR(RossObjective(lin.data, params, Config(TrainerKind::kRoss, 0.0)),
              ErmObjective(lin.data, params, hinge) + ErmObjective(positive, params, hinge),
              1e-12);
}

TEST(Erm, ExamplesAndZeroRadiusClosedForm) {
  const LossSpec hinge(LossFamily::kHinge);
  EXPECT_EQ(ErmObjective(OnePoint(Vec({1, 3, 0})), Params(Vec({0, 0, 0})), hinge), 1.0);
  EXPECT_EQ(ErmObjective(OnePoint(Vec({1, 3, 0})), Params(Vec({0, 1, 0})), hinge), 0.0);
  const SyntheticData lin = GenerateLin(50, 12);
  const ModelParams params = Params(Vec({0.5, -0.25, 0.75}), 0.3);
  Dataset ones = lin.data;
  ones.features.col(0).setOnes();
  const Objective closed(ones, kLin, Config(TrainerKind::kCdroClosed, 0.0));
  EXPECT_EQ(closed.Value(params), ErmObjective(ones, params, hinge));
}

TEST(ProjectNullspace, RemovesSensitiveComponent) {
  const Matrix m = LinearMatrix(kLin);
  const std::vector<int> sensitive = {0};
  ExpectNear(ProjectNullspace(Vec({1, 0, 0}), m, sensitive), Vec({5.0 / 6, -1.0 / 3, 1.0 / 6}),
             1e-12);
  // (1, 2, -1) . theta = 0 already.
  ExpectNear(ProjectNullspace(Vec({1, 0, 1}), m, sensitive), Vec({1, 0, 1}), 1e-12);
  ExpectNear(ProjectNullspace(Vec({0, 0, 0}), m, sensitive), Vec({0, 0, 0}), 0.0);
}

TEST(ProjectNullspace, FeasibleModelsHaveNoTwinGap) {
  const SyntheticData lin = GenerateLin(200, 13);
  const Vector theta = ProjectNullspace(Vec({0.7, -1.2, 0.4}), LinearMatrix(kLin), {{0}});
  EXPECT_EQ(CounterfactualUnfairness(Params(theta, 0.3), kLin, lin.data, IntegerLevels(2)), 0.0);
}

TEST(Trainer, SeparableDataIsFitExactly) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  Matrix rows(60, 3);
  Vector labels(60);
  long n = 0;
  while (n < 60) {
    const Vector v = Vec({static_cast<double>(n % 2), normal(rng), normal(rng)});
    const double score = v[1] - 0.5 * v[2] + 0.2;
    if (std::abs(score) < 0.3) continue;
    rows.row(n) = v.transpose();
    labels[n++] = score > 0 ? 1.0 : -1.0;
  }
  const Dataset data = Points(kLin, rows, labels);
  TrainerConfig cfg = Config(TrainerKind::kErm, 0.0);
  cfg.optimizer = {0.05, 10, 400};
  const TrainResult result = Train(data, kLin, cfg);
  EXPECT_EQ(Accuracy(result.params, data), 1.0);
  EXPECT_LT(result.trace.back(), result.trace.front());
}

TEST(Trainer, SingleLevelZeroRadiusFollowsErm) {
  SyntheticData lin = GenerateLin(120, 14);
  lin.data.features.col(0).setOnes();
  TrainerConfig erm = Config(TrainerKind::kErm, 0.0);
  erm.optimizer = {0.01, 16, 5};
  erm.seed = 3;
  TrainerConfig cdro = erm;
  cdro.kind = TrainerKind::kCdroClosed;
  const TrainResult a = Train(lin.data, kLin, erm);
  const TrainResult b = Train(lin.data, kLin, cdro);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.params.theta, b.params.theta);
  EXPECT_EQ(a.params.intercept, b.params.intercept);
}

TEST(Trainer, DeterministicPerSeed) {
  const SyntheticData lin = GenerateLin(200, 15);
  TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.05, LossFamily::kLogExponential);
  cfg.optimizer = {0.01, 32, 3};
  cfg.seed = 1;
  const TrainResult a = Train(lin.data, kLin, cfg);
  const TrainResult b = Train(lin.data, kLin, cfg);
  EXPECT_EQ(a.trace, b.trace);
  cfg.seed = 2;
  EXPECT_NE(Train(lin.data, kLin, cfg).params.theta, a.params.theta);
}

TEST(Trainer, NullspaceModeStaysFeasible) {
  const SyntheticData lin = GenerateLin(300, 16);
  TrainerConfig cfg = Config(TrainerKind::kCdroClosed, 0.05, LossFamily::kLogExponential);
  cfg.constraint_mode = ConstraintMode::kNullspace;
  cfg.optimizer = {0.02, 50, 5};
  const TrainResult result = Train(lin.data, kLin, cfg);
  const Vector pulled = LinearMatrix(kLin).transpose() * result.params.theta;
  EXPECT_NEAR(pulled[0], 0.0, 1e-12);
  EXPECT_EQ(CounterfactualUnfairness(result.params, kLin, lin.data, IntegerLevels(2)), 0.0);
}

TEST(Trainer, ZeroStartAndStepCount) {
  const SyntheticData lin = GenerateLin(100, 17);
  TrainerConfig cfg = Config(TrainerKind::kErm, 0.0);
  cfg.optimizer = {0.01, 30, 2};
  const TrainResult result = Train(lin.data, kLin, cfg);
  EXPECT_EQ(result.steps, 8);
  EXPECT_EQ(result.trace.size(), 3u);
  EXPECT_EQ(result.trace.front(), 1.0);  // hinge at theta = 0
  EXPECT_EQ(InitialParams(4).theta, Vector::Zero(4));
}

TEST(TrainerKind, NamesRoundTrip) {
  for (TrainerKind kind : {TrainerKind::kErm, TrainerKind::kAdversarial, TrainerKind::kRoss,
                           TrainerKind::kCdroClosed, TrainerKind::kCdroFirstOrder}) {
    EXPECT_EQ(ParseTrainerKind(TrainerKindName(kind)), kind);
  }
  EXPECT_THROW(ParseTrainerKind("svm"), SchemaError);
}

}  // namespace
}  // namespace cfdro
