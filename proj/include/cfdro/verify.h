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

#ifndef CFDRO_VERIFY_H_
#define CFDRO_VERIFY_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cfdro/dataset.h"
#include "cfdro/experiment.h"
#include "cfdro/losses.h"
#include "cfdro/norm.h"
#include "cfdro/scm.h"

namespace cfdro {

// Deliberate corruption used to prove the checks can fail.
enum class Fault { kNone, kClosedForm };

struct VerifyOptions {
  int budget = 25;  // random instances per randomized check; 0 skips
  uint64_t seed = 20240501;
  Fault fault = Fault::kNone;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

// A small random labelled sample on a random linear SCM with one binary
// sensitive root.
struct LinearInstance {
  Scm scm;
  Dataset data;
  ModelParams params;
  NormSpec norm;
  LossSpec loss;
  double delta = 0.1;
  double order = 1.0;
};

LinearInstance RandomLinearInstance(std::mt19937_64& rng, const LossSpec& loss, double order,
                                    double delta, int max_points = 5, int max_nodes = 3);
Dataset DatasetFor(const Scm& scm, const Matrix& rows, const Vector& labels);

double RelativeGap(double a, double b);

CheckResult CheckExample1();
CheckResult CheckStrongDuality(const VerifyOptions& options);
CheckResult CheckLipschitzForms(const VerifyOptions& options);
CheckResult CheckFirstOrderResidual(const VerifyOptions& options);
CheckResult CheckWassersteinLemma();
CheckResult CheckSandwich(const VerifyOptions& options);
CheckResult CheckMetricInvariants(const VerifyOptions& options);
CheckResult CheckGradients(const VerifyOptions& options);
CheckResult CheckFiniteSampleBound();

struct Table1Outcome {
  CheckResult check;
  ExperimentSummary summary;
  std::vector<std::string> trainers;
  std::vector<double> mean_unfair;    // U at the first radius, per trainer
  std::vector<double> mean_accuracy;  // per trainer
};

// ERM, AL, ROSS and CDRO on LIN, radius 0.05 for the three robust ones.
ExperimentConfig Table1Config(int seeds, int n);
Table1Outcome CheckTable1(int seeds = 10, int n = 2000);

// Every oracle-backed check except the (slow) Table 1 reproduction.
std::vector<CheckResult> VerifySuite(const VerifyOptions& options);

}  // namespace cfdro

#endif  // CFDRO_VERIFY_H_
