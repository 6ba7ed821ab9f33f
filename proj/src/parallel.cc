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

#include "cfdro/parallel.h"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

#include "cfdro/error.h"

namespace cfdro {
namespace {

std::atomic<int> g_thread_override{0};

int ThreadsFromEnvironment() {
  const char* env = std::getenv("CFDRO_THREADS");
  if (env == nullptr) return 0;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == env || value <= 0) return 0;
  return static_cast<int>(value);
}

}  // namespace

void CheckDimension(long actual, long expected, const std::string& what) {
  if (actual != expected) {
    throw DimensionError(what + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

int MaxThreads() {
  const int forced = g_thread_override.load();
  if (forced > 0) return forced;
  static const int from_env = ThreadsFromEnvironment();
  if (from_env > 0) return from_env;
  return omp_get_max_threads();
}

void SetMaxThreads(int threads) { g_thread_override.store(threads); }

double PairwiseSum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }
  const size_t half = n / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

uint64_t StableHash(std::string_view text, uint64_t seed) {
  uint64_t hash = 14695981039346656037ull ^ (seed * 0x9E3779B97F4A7C15ull);
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace cfdro
