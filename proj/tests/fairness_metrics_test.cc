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

#include <random>

#include "cfdro/dataset.h"
#include "cfdro/error.h"
#include "cfdro/fairness_metrics.h"
#include "cfdro/objectives.h"
#include "test_util.h"

namespace cfdro {
namespace {

using testing::Points;
using testing::Vec;

const Scm kLin = LinScm();
const Dataset kPoint = Points(kLin, Vec({1, 3, 0}).transpose(), Vec({1}));
const std::vector<Vector> kBoth = IntegerLevels(2);

ModelParams Params(const Vector& theta, double b = 0.0) { return {theta, b}; }

TEST(Accuracy, Basics) {
  const SyntheticData lin = GenerateLin(500, 1);
  Dataset data = lin.data;
  // A separator built from the labels themselves.
  data.features.col(1) = data.labels;
  EXPECT_EQ(Accuracy(Params(Vec({0, 1, 0})), data), 1.0);
  EXPECT_EQ(Accuracy(Params(Vec({0, 0, 0}), 0.5), lin.data), lin.data.PositiveRate());
}

TEST(Accuracy, TrueDirectionBeatsChance) {
  const SyntheticData lin = GenerateLin(2000, 2);
  EXPECT_GT(Accuracy(Params(Vec({0, 1, 1})), lin.data), 0.6);
}

TEST(CounterfactualUnfairness, Examples) {
  EXPECT_EQ(CounterfactualUnfairness(Params(Vec({0, 1, 0}), -2.0), kLin, kPoint, kBoth), 1.0);
  EXPECT_EQ(CounterfactualUnfairness(Params(Vec({0, 1, 0}), 0.0), kLin, kPoint, kBoth), 0.0);
  // Only the own level listed: nothing to flip to.
  EXPECT_EQ(CounterfactualUnfairness(Params(Vec({0, 1, 0}), -2.0), kLin, kPoint, {Vec({1})}),
            0.0);
}

TEST(CounterfactualUnfairness, SensitiveFreeModelIsFair) {
  const SyntheticData lin = GenerateLin(300, 3);
  // (1, 2, -1) . theta = 0 for theta = (1, 0, 1).
  EXPECT_EQ(CounterfactualUnfairness(Params(Vec({1, 0, 1}), 0.4), kLin, lin.data, kBoth), 0.0);
}

TEST(CounterfactualUnfairness, SingleLevelIsFair) {
  SyntheticData lin = GenerateLin(200, 4);
  lin.data.features.col(0).setZero();
  EXPECT_EQ(CounterfactualUnfairness(Params(Vec({0.3, 1, -0.4}), 0.1), kLin, lin.data), 0.0);
}

TEST(UnfairArea, OnePointThreshold) {
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0, 1, 0}));
  EXPECT_EQ(UnfairArea(params, metric, kPoint, 0.05, kBoth), 0.0);
  EXPECT_EQ(UnfairArea(params, metric, kPoint, 0.999, kBoth), 0.0);
  EXPECT_EQ(UnfairArea(params, metric, kPoint, 1.0, kBoth), 1.0);
}

TEST(UnfairArea, ZeroRadiusIsCounterfactualUnfairness) {
  const SyntheticData lin = GenerateLin(400, 5);
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0.8, 0.3, 0.2}), -0.2);
  EXPECT_EQ(UnfairArea(params, metric, lin.data, 0.0, kBoth),
            CounterfactualUnfairness(params, kLin, lin.data, kBoth));
}

TEST(UnfairArea, ConstantModelIsFair) {
  const SyntheticData lin = GenerateLin(100, 6);
  const CfdfMetric metric(kLin, NormSpec::L2());
  EXPECT_EQ(UnfairArea(Params(Vec({0, 0, 0}), 0.7), metric, lin.data, 5.0), 0.0);
}

TEST(NonrobustArea, OnePointThreshold) {
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0, 1, 0}));
  EXPECT_EQ(NonrobustArea(params, metric, kPoint, 0.0), 0.0);
  EXPECT_EQ(NonrobustArea(params, metric, kPoint, 0.05), 0.0);
  EXPECT_EQ(NonrobustArea(params, metric, kPoint, 2.9), 0.0);
  EXPECT_EQ(NonrobustArea(params, metric, kPoint, 3.0), 1.0);
}

TEST(Areas, OrderedAndMonotoneOverRandomModels) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const SyntheticData lin = GenerateLin(300, 7);
  const double radii[] = {0.0, 0.01, 0.05, 0.2, 1.0};
  for (const NormSpec& norm : {NormSpec::L1(), NormSpec::L2(), NormSpec::Linf()}) {
    const CfdfMetric metric(kLin, norm);
    for (int trial = 0; trial < 10; ++trial) {
      const ModelParams params = Params(Vec({normal(rng), normal(rng), normal(rng)}), normal(rng));
      const double cf = CounterfactualUnfairness(params, kLin, lin.data);
      double last_u = 0.0, last_r = 0.0;
      for (double r : radii) {
        const double u = UnfairArea(params, metric, lin.data, r);
        const double nr = NonrobustArea(params, metric, lin.data, r);
        EXPECT_GE(u, cf);
        EXPECT_LE(nr, u);
        EXPECT_GE(u, last_u);
        EXPECT_GE(nr, last_r);
        last_u = u;
        last_r = nr;
      }
    }
  }
}

TEST(UnfairFlags, SerialAndParallelAgree) {
  const SyntheticData lin = GenerateLin(500, 8);
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0.5, 0.7, 0.1}), 0.2);
  EXPECT_EQ(UnfairFlags(params, metric, lin.data, 0.05, false, {}, Execution::kSerial),
            UnfairFlags(params, metric, lin.data, 0.05, false, {}, Execution::kParallel));
}

TEST(UnfairFlagsSampled, ZeroRadiusIsCounterfactualIndicator) {
  const SyntheticData lin = GenerateLin(300, 9);
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0.8, 0.3, 0.2}), -0.2);
  EXPECT_EQ(UnfairFlagsSampled(params, metric, lin.data, 0.0, 1, 1),
            UnfairFlags(params, metric, lin.data, 0.0, false));
}

// Search never finds a flip the exact area misses.
TEST(UnfairFlagsSampled, NeverExceedsClosedForm) {
  const SyntheticData lin = GenerateLin(200, 10);
  const CfdfMetric metric(kLin, NormSpec::L2());
  const ModelParams params = Params(Vec({0.4, 0.9, -0.6}), 0.1);
  const auto sampled = UnfairFlagsSampled(params, metric, lin.data, 0.3, 200, 2);
  const auto exact = UnfairFlags(params, metric, lin.data, 0.3, false);
  for (size_t i = 0; i < exact.size(); ++i) EXPECT_LE(sampled[i], exact[i]) << "row " << i;
}

TEST(UnfairAreaSampled, NonlinearModelIsContained) {
  std::vector<ScmNode> nodes(3);
  nodes[0] = {"a", {}, StructuralEquation::Linear({}), ExogenousSpec::Bernoulli(0.5)};
  nodes[1] = {"e", {0}, StructuralEquation::Additive({{0, "tanh", 1.0}}),
              ExogenousSpec::Normal(0, 1)};
  nodes[2] = {"i", {0, 1},
              StructuralEquation::Additive({{0, "identity", 1.0}, {1, "sin", 2.0}}),
              ExogenousSpec::Normal(0, 1)};
  const Scm scm(std::move(nodes), {0});
  const SampleTable t = Sample(scm, 150, 3);
  Vector labels(150);
  for (long i = 0; i < 150; ++i) labels[i] = t.features(i, 2) > 0 ? 1 : -1;
  const Dataset data = Points(scm, t.features, labels);
  const CfdfMetric metric(scm, NormSpec::L1());
  const ModelParams params = Params(Vec({0.6, -0.4, 1.0}), 0.0);
  const double cf = CounterfactualUnfairness(params, scm, data);
  const double u = UnfairAreaSampled(params, metric, data, 0.1, 50, 4);
  EXPECT_GE(u, cf);
  EXPECT_LE(u, 1.0);
  EXPECT_THROW(UnfairArea(params, metric, data, 0.1), ScmError);
}

TEST(EvaluateMetrics, FillsEveryRadius) {
  const SyntheticData lin = GenerateLin(200, 11);
  const CfdfMetric metric(kLin, NormSpec::L1());
  const ModelParams params = Params(Vec({0.5, 0.7, 0.1}), 0.2);
  const MetricsReport report = EvaluateMetrics(params, metric, lin.data, {0.05, 0.01});
  EXPECT_EQ(report.unfair.size(), 2u);
  EXPECT_EQ(report.nonrobust.size(), 2u);
  EXPECT_EQ(report.accuracy, Accuracy(params, lin.data));
  EXPECT_EQ(report.counterfactual, CounterfactualUnfairness(params, kLin, lin.data));
  EXPECT_EQ(report.unfair.at(0.05), UnfairArea(params, metric, lin.data, 0.05));
}

TEST(Metrics, RejectBadInput) {
  const CfdfMetric metric(kLin, NormSpec::L1());
  EXPECT_THROW(UnfairArea(Params(Vec({0, 1, 0})), metric, kPoint, -0.1), Error);
  EXPECT_THROW(UnfairAreaSampled(Params(Vec({0, 1, 0})), metric, kPoint, 0.1, 0, 1), Error);
  Dataset empty = kPoint;
  empty.features.resize(0, 3);
  empty.labels.resize(0);
  EXPECT_THROW(Accuracy(Params(Vec({0, 1, 0})), empty), Error);
}

}  // namespace
}  // namespace cfdro
