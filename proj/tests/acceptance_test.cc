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


// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <cstdio>
#include <vector>

#include "cfdro/verify.h"

int main() {
  const cfdro::VerifyOptions options;  // 25 instances per randomized check
  std::vector<cfdro::CheckResult> results = {
      cfdro::CheckExample1(),
      cfdro::CheckStrongDuality(options),
      cfdro::CheckLipschitzForms(options),
      cfdro::CheckFirstOrderResidual(options),
      cfdro::CheckWassersteinLemma(),
      cfdro::CheckSandwich(options),
      cfdro::CheckMetricInvariants(options),
      cfdro::CheckGradients(options),
      cfdro::CheckTable1(10, 2000).check,
      cfdro::CheckFiniteSampleBound(),
  };
  int failed = 0;
  for (size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    std::printf("%s criterion %zu (%s): %s\n", r.passed ? "PASS" : "FAIL", k + 1,
                r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}
