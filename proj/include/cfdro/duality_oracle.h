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

#ifndef CFDRO_DUALITY_ORACLE_H_
#define CFDRO_DUALITY_ORACLE_H_

#include <cstdint>
#include <vector>

#include "cfdro/dataset.h"
#include "cfdro/losses.h"
#include "cfdro/norm.h"
#include "cfdro/parallel.h"
#include "cfdro/scm.h"

namespace cfdro {

// Brute-force checks for the regularized objectives. Everything here
// evaluates the loss psi = h^{loss.power()} on explicit counterfactual
// points; nothing reuses the closed forms being checked, except the
// sandwich, whose per-copy sup is closed form by design.

// How the transport cost enters the inner sup: lambda * r^p (default) or
// lambda^p * r.
enum class PenaltyConvention { kLambdaCostPow, kLambdaPowCost };

struct GridSpec {
  // lambda search: 0 plus a geometric grid, then golden-section refinement.
  int lambda_points = 64;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  int golden_iterations = 200;
  // Shift magnitudes: 0, a linear grid on (0, R], a geometric grid on
  // [floor * R, R].
  double box_radius = 1.0;
  int linear_magnitudes = 400;
  int geometric_magnitudes = 60;
  double geometric_floor = 1e-6;
  // Box doubling while the boundary is active at the optimum.
  int max_expansions = 8;
  double expansion_tolerance = 1e-6;
  // Shift directions: +-axes, optional sign corners, and dense directions
  // (angles in 2D, a spherical lattice in 3D, seeded draws above).
  bool corners = true;
  int dense_directions = 64;
  uint64_t seed = 0;
  PenaltyConvention penalty = PenaltyConvention::kLambdaCostPow;
  Execution execution = Execution::kParallel;

  void Validate() const;
};

// A small labelled sample with its model, evaluated by the oracles.
struct OracleProblem {
  const Dataset* data = nullptr;
  const Scm* scm = nullptr;
  ModelParams params;
  LossSpec loss;  // psi = h^{loss.power()}
  NormSpec norm;
  double delta = 0.0;
  double order = 1.0;  // transport order p
  std::vector<Vector> levels;  // empty: observed levels

  void Validate() const;
};

struct DualResult {
  double value = 0.0;
  double lambda_star = 0.0;
  double box_radius = 0.0;
  bool boundary_active = false;
  bool unbounded_suspected = false;
  double coarse_value = 0.0;  // best lambda-grid value before refinement
  int expansions = 0;
};

std::vector<Vector> ShiftDirections(int dimension, const NormSpec& norm, bool corners,
                                    int dense, uint64_t seed);
std::vector<double> ShiftMagnitudes(double radius, int linear, int geometric,
                                    double floor);

// profiles(i, k): max over levels and directions of psi at magnitude k.
Matrix ShiftProfiles(const OracleProblem& problem, const std::vector<Vector>& directions,
                     const std::vector<double>& magnitudes, Execution execution);

DualResult DualValueGrid(const OracleProblem& problem, const GridSpec& grid);

struct PrimalResult {
  double value = 0.0;
  long candidates = 0;
  long variables = 0;
};

// Exact LP over joint laws on samples x candidates with the sample
// marginal fixed and the transport budget mean c^p <= delta^p. Candidates
// are every sample's twins shifted over the grid; label changes cost +inf
// and are left out.
PrimalResult PrimalValueBrute(const OracleProblem& problem, const GridSpec& grid);

// Same LP with an explicit candidate list (rows are points). Candidates
// inherit the label of `candidate_labels`.
PrimalResult PrimalValueOnSupport(const OracleProblem& problem, const Matrix& candidates,
                                  const Vector& candidate_labels);

// (min_pi sum pi_ij c_ij^p)^{1/p} over couplings of the two weight vectors.
double OtCostDiscrete(const Vector& p_weights, const Vector& q_weights, const Matrix& cost,
                      double order);

struct SandwichResult {
  double lower = 0.0;
  double upper = 0.0;
  double lipschitz = 0.0;  // L
  double offset = 0.0;     // M
  double diameter = 0.0;   // D
  int copies = 0;
  std::vector<double> radii;  // per copy, sample-major
};

// K-copy adversarial bracket on a linear SCM. Radii are capped at
// `box_radius` and D = box_radius^p. `warm_start` (from the K/2 run) is
// duplicated when sizes allow.
SandwichResult AdversarialSandwich(const OracleProblem& problem, int copies,
                                   double box_radius,
                                   const std::vector<double>& warm_start = {});

struct FiniteSampleInputs {
  double entropy_integral = 1.0;  // C_L
  double lipschitz = 1.0;         // L
  double bound = 1.0;             // M
  double metric_bound = 1.0;      // M_d
  double diameter = 1.0;          // diam V
  double order = 1.0;             // p
  double delta = 0.1;
  double eta = 1.0;
  double epsilon = 0.05;
  double samples = 100.0;  // N
};

double FiniteSampleBound(const FiniteSampleInputs& in);

}  // namespace cfdro

#endif  // CFDRO_DUALITY_ORACLE_H_
