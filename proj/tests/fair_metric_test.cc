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
#include "cfdro/fair_metric.h"
#include "cfdro/norm.h"
#include "test_util.h"

namespace cfdro {
namespace {

using testing::Vec;

const Scm kM2 = GenerateExample1(Example1Model::kLinear);
const Scm kM1 = GenerateExample1(Example1Model::kIndependent);

TEST(NormSpec, DualPairs) {
  EXPECT_DOUBLE_EQ(NormSpec::L1().DualNorm(Vec({1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(NormSpec::L1().DualNorm(Vec({-3, 2})), 3.0);
  EXPECT_DOUBLE_EQ(NormSpec::L2().DualNorm(Vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(NormSpec::Linf().DualNorm(Vec({-3, 2})), 5.0);
  for (const auto& norm : {NormSpec::L1(), NormSpec::L2(), NormSpec::Linf()}) {
    EXPECT_EQ(norm.DualNorm(Vec({0, 0, 0})), 0.0);
    EXPECT_EQ(norm.Norm(Vec({0, 0})), 0.0);
  }
}

TEST(NormSpec, WeightedNormAndItsDual) {
  const NormSpec w = NormSpec::WeightedL2(Vec({4, 1}));
  EXPECT_DOUBLE_EQ(w.Norm(Vec({1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(w.DualNorm(Vec({1, 0})), 0.5);
  EXPECT_THROW(NormSpec::WeightedL2(Vec({1, 0})), SchemaError);
}

// The maximizer has unit norm and attains the dual norm.
TEST(NormSpec, DualMaximizerAttainsDualNorm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const NormSpec norms[] = {NormSpec::L1(), NormSpec::L2(), NormSpec::Linf(),
                            NormSpec::WeightedL2(Vec({0.5, 2, 1}))};
  for (const auto& norm : norms) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = Vec({normal(rng), normal(rng), normal(rng)});
      const Vector s = norm.DualMaximizer(x);
      EXPECT_NEAR(norm.Norm(s), 1.0, 1e-12) << norm.ToString();
      EXPECT_NEAR(s.dot(x), norm.DualNorm(x), 1e-12) << norm.ToString();
    }
  }
}

TEST(NormSpec, ParseRoundTrip) {
  for (const char* text : {"l1", "l2", "linf"}) {
    EXPECT_EQ(NormSpec::Parse(NormSpec::Parse(text).ToString()).kind(),
              NormSpec::Parse(text).kind());
  }
  EXPECT_EQ(NormSpec::Parse("wl2:1,2").weights().size(), 2);
  EXPECT_THROW(NormSpec::Parse("l3"), SchemaError);
}

TEST(CfdfDistance, TwinsAreAtZero) {
  const CfdfMetric metric(kM2, NormSpec::L1());
  EXPECT_NEAR(CfdfDistance(metric, Vec({1, 1, 1}), Vec({0, 0, -2})), 0.0, 1e-12);
  EXPECT_EQ(CfdfDistance(metric, Vec({1, 1, 1}), Vec({1, 1, 1})), 0.0);
}

TEST(CfdfDistance, ShiftCostsItsNorm) {
  const CfdfMetric metric(kM2, NormSpec::L1());
  const Vector moved = CounterfactualShift(kM2, Vec({1, 1, 1}), Vec({0.05, 0}));
  EXPECT_NEAR(CfdfDistance(metric, Vec({1, 1, 1}), moved), 0.05, 1e-12);
}

TEST(CfdfDistance, IsAPseudometric) {
  const Scm lin = LinScm();
  const CfdfMetric metric(lin, NormSpec::L2());
  const SampleTable t = Sample(lin, 30, 5);
  for (long i = 0; i + 2 < 30; ++i) {
    const Vector a = t.features.row(i), b = t.features.row(i + 1), c = t.features.row(i + 2);
    EXPECT_NEAR(metric.Distance(a, b), metric.Distance(b, a), 1e-12);
    EXPECT_LE(metric.Distance(a, c), metric.Distance(a, b) + metric.Distance(b, c) + 1e-12);
    EXPECT_GE(metric.Distance(a, b), 0.0);
  }
}

TEST(NaiveDistance, FeatureSpaceBaseline) {
  EXPECT_NEAR(NaiveDistance(NormSpec::L1(), kM2, Vec({1, 1, 1}), Vec({1, 1.05, 1.1})), 0.15,
              1e-12);
  EXPECT_NEAR(NaiveDistance(NormSpec::L1(), kM2, Vec({1, 1, 1}), Vec({0, 0, -2})), 4.0, 1e-12);
  EXPECT_EQ(NaiveDistance(NormSpec::L1(), kM2, Vec({1, 1, 1}), Vec({1, 1, 1})), 0.0);
  // Under independence the twin equals the point apart from gender.
  const Vector twin = Twins(kM1, Vec({1, 1, 1}), IntegerLevels(2))[0];
  EXPECT_EQ(NaiveDistance(NormSpec::L1(), kM1, Vec({1, 1, 1}), twin), 0.0);
}

TEST(CostZ, LabelChangeIsForbidden) {
  const CfdfMetric metric(kM2, NormSpec::L1());
  EXPECT_TRUE(CostZ(metric, {Vec({1, 1, 1}), 1}, {Vec({1, 1, 1}), -1}).is_infinite());
  EXPECT_EQ(CostZ(metric, {Vec({1, 1, 1}), 1}, {Vec({1, 1, 1}), 1}).value(), 0.0);
  EXPECT_NEAR(CostZ(metric, {Vec({1, 1, 1}), -1}, {Vec({0, 0, -2}), -1}).value(), 0.0, 1e-12);
  EXPECT_THROW(CostZ(metric, {Vec({1, 1, 1}), 0}, {Vec({1, 1, 1}), 0}), Error);
}

TEST(ExtendedCost, Arithmetic) {
  const auto inf = ExtendedCost::Infinite();
  const auto two = ExtendedCost::Finite(2.0);
  EXPECT_TRUE((inf + two).is_infinite());
  EXPECT_EQ((two + two).value(), 4.0);
  EXPECT_EQ((inf * 0.0).value(), 0.0);
  EXPECT_TRUE((inf * 3.0).is_infinite());
  EXPECT_TRUE(two < inf);
  EXPECT_FALSE(inf < inf);
  EXPECT_TRUE(inf == ExtendedCost::Infinite());
  EXPECT_THROW(inf.value(), Error);
  EXPECT_THROW(ExtendedCost::Finite(-1.0), Error);
}

TEST(LatentTable, MatchesPairwiseDistance) {
  const Scm lin = LinScm();
  const CfdfMetric metric(lin, NormSpec::L1());
  const SampleTable t = Sample(lin, 10, 2);
  const LatentTable table(metric, t.features);
  for (long i = 0; i < 10; ++i) {
    for (long j = 0; j < 10; ++j) {
      EXPECT_NEAR(table.Distance(i, j),
                  metric.Distance(t.features.row(i).transpose(), t.features.row(j).transpose()),
                  1e-12);
    }
  }
}

}  // namespace
}  // namespace cfdro
