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

#ifndef CFDRO_ERROR_H_
#define CFDRO_ERROR_H_

#include <stdexcept>
#include <string>

namespace cfdro {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix sizes do not agree with the model they are used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed causal model: cycles, unknown parents, bad sensitive indices.
class ScmError : public Error {
 public:
  using Error::Error;
};

// Input files or config strings that do not match their schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Training aborted (non-finite objective, infeasible configuration).
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Brute-force verifier could not certify its own result.
class OracleError : public Error {
 public:
  using Error::Error;
};

void CheckDimension(long actual, long expected, const std::string& what);

}  // namespace cfdro

#endif  // CFDRO_ERROR_H_
