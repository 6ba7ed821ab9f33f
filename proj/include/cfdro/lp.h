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

#ifndef CFDRO_LP_H_
#define CFDRO_LP_H_

#include "cfdro/scm.h"

namespace cfdro {

// maximize c^T x  s.t.  a_eq x = b_eq,  a_le x <= b_le,  x >= 0.
// Either constraint block may have zero rows.
struct LinearProgram {
  Vector objective;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_le;
  Vector b_le;
};

struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double value = 0.0;
  Vector x;
  long iterations = 0;
};

// Dense two-phase simplex with Bland's rule. Meant for the small exact
// problems of the oracles; cost is cubic in the row count per sweep.
LpResult SolveLp(const LinearProgram& lp);

}  // namespace cfdro

#endif  // CFDRO_LP_H_
