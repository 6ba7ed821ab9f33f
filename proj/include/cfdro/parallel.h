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

#ifndef CFDRO_PARALLEL_H_
#define CFDRO_PARALLEL_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace cfdro {

// Every data-parallel kernel in the library has a serial reference path and
// an OpenMP path. Both produce bit-identical results: parallel loops only
// write per-item slots, and reductions happen afterwards in a fixed order.
enum class Execution { kSerial, kParallel };

// Thread cap for OpenMP regions. Reads CFDRO_THREADS once; falls back to the
// OpenMP default when unset or invalid.
int MaxThreads();

// Overrides the cap for the rest of the process (0 restores the default).
void SetMaxThreads(int threads);

// Pairwise (cascade) summation. Order depends only on the input length.
double PairwiseSum(std::span<const double> values);

// 64-bit FNV-1a, stable across platforms; used to derive per-cell seeds.
uint64_t StableHash(std::string_view text, uint64_t seed = 0);

}  // namespace cfdro

#endif  // CFDRO_PARALLEL_H_
