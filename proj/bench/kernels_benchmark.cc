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


// Serial reference paths against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "cfdro/dataset.h"
#include "cfdro/duality_oracle.h"
#include "cfdro/fair_metric.h"
#include "cfdro/fairness_metrics.h"

namespace {

using cfdro::Execution;

cfdro::ModelParams LinParams() {
  cfdro::ModelParams params;
  params.theta.resize(3);
  params.theta << 0.4, 1.0, 0.7;
  params.intercept = -0.2;
  return params;
}

void BM_ShiftProfiles(benchmark::State& state, Execution execution) {
  const auto lin = cfdro::GenerateLin(static_cast<int>(state.range(0)), 7);
  cfdro::OracleProblem problem;
  problem.data = &lin.data;
  problem.scm = &lin.scm;
  problem.params = LinParams();
  problem.loss = cfdro::LossSpec(cfdro::LossFamily::kHinge);
  problem.norm = cfdro::NormSpec::L2();
  problem.delta = 0.1;
  const auto directions = cfdro::ShiftDirections(2, problem.norm, true, 64, 0);
  const auto magnitudes = cfdro::ShiftMagnitudes(1.0, 400, 60, 1e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cfdro::ShiftProfiles(problem, directions, magnitudes, execution));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_UnfairFlags(benchmark::State& state, Execution execution) {
  const auto lin = cfdro::GenerateLin(static_cast<int>(state.range(0)), 7);
  const cfdro::CfdfMetric metric(lin.scm, cfdro::NormSpec::L1());
  const auto params = LinParams();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfdro::UnfairFlags(params, metric, lin.data, 0.05, false, {}, execution));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BM_ShiftProfiles, serial, Execution::kSerial)->Arg(64)->Arg(512);
BENCHMARK_CAPTURE(BM_ShiftProfiles, openmp, Execution::kParallel)->Arg(64)->Arg(512);
BENCHMARK_CAPTURE(BM_UnfairFlags, serial, Execution::kSerial)->Arg(2000)->Arg(50000);
BENCHMARK_CAPTURE(BM_UnfairFlags, openmp, Execution::kParallel)->Arg(2000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
