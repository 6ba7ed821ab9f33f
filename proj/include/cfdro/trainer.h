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

#ifndef CFDRO_TRAINER_H_
#define CFDRO_TRAINER_H_

#include <vector>

#include "cfdro/dataset.h"
#include "cfdro/objectives.h"

namespace cfdro {

struct TrainResult {
  ModelParams params;
  // Full-data objective after each epoch; index 0 is the initial value.
  std::vector<double> trace;
  long steps = 0;
};

// Adam on shuffled minibatches (beta1 0.9, beta2 0.999, eps 1e-8), starting
// from theta = 0 and b = 0; cfg.seed only drives the minibatch order. A NaN
// objective aborts with TrainingError.
TrainResult Train(const Dataset& data, const Scm& scm, const TrainerConfig& cfg);
TrainResult Train(const Objective& objective);

ModelParams InitialParams(int dimension);

}  // namespace cfdro

#endif  // CFDRO_TRAINER_H_
