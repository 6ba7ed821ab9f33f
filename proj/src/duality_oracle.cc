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

#include "cfdro/duality_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <omp.h>

#include "cfdro/error.h"
#include "cfdro/fair_metric.h"
#include "cfdro/lp.h"
#include "cfdro/objectives.h"

namespace cfdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Psi(const LossSpec& loss, double score, double y) {
  return PowerOf(loss.H(loss.Margin(score, y)), loss.power());
}

std::vector<Vector> LevelsOf(const OracleProblem& problem) {
  return problem.levels.empty() ? ObservedLevels(*problem.scm, problem.data->features)
                                : problem.levels;
}

// Row i of the profile table.
void ProfileRow(const OracleProblem& problem, const std::vector<Vector>& levels,
                const std::vector<Vector>& directions, const std::vector<double>& magnitudes,
                long i, double* out) {
  const Scm& scm = *problem.scm;
  const Vector v = problem.data->Row(i);
  const double y = problem.data->labels[i];
  const Vector ux = NonsensitiveLatent(scm, v);
  const size_t k_count = magnitudes.size();
  std::fill(out, out + k_count, -kInf);
  for (const auto& level : levels) {
    const Vector base = SemiLatentInversePacked(scm, PackSemiLatent(scm, level, ux));
    const double base_score = problem.params.Score(base);
    for (const auto& d : directions) {
      if (scm.is_linear()) {
        // The shifted point moves along a fixed image of d.
        const Vector image =
            SemiLatentInversePacked(scm, PackSemiLatent(scm, level, ux + d)) - base;
        const double rate = problem.params.theta.dot(image);
        for (size_t k = 0; k < k_count; ++k) {
          out[k] = std::max(out[k], Psi(problem.loss, base_score + magnitudes[k] * rate, y));
        }
      } else {
        for (size_t k = 0; k < k_count; ++k) {
          const Vector moved = SemiLatentInversePacked(
              scm, PackSemiLatent(scm, level, ux + magnitudes[k] * d));
          out[k] = std::max(out[k], Psi(problem.loss, problem.params.Score(moved), y));
        }
      }
    }
  }
}

struct LambdaSolve {
  double value = 0.0;
  double lambda = 0.0;
  double coarse = 0.0;
  bool boundary = false;
};

class DualFunction {
 public:
  DualFunction(const Matrix& profiles, const std::vector<double>& magnitudes, double delta,
               double order, PenaltyConvention penalty)
      : profiles_(profiles), order_(order), penalty_(penalty) {
    budget_ = std::pow(delta, order);
    for (double r : magnitudes) {
      costs_.push_back(penalty == PenaltyConvention::kLambdaCostPow ? std::pow(r, order) : r);
    }
  }

  double Penalty(double lambda) const {
    return penalty_ == PenaltyConvention::kLambdaCostPow ? lambda : std::pow(lambda, order_);
  }

  // Sets *boundary when the largest magnitude attains some sample's sup,
  // ties included: a minimizing lambda often sits exactly where the edge
  // starts to win, which is the signature of a box that is too small.
  double operator()(double lambda, bool* boundary = nullptr) const {
    const double scale = Penalty(lambda);
    std::vector<double> best(static_cast<size_t>(profiles_.rows()));
    bool edge = false;
    const long last = profiles_.cols() - 1;
    for (long i = 0; i < profiles_.rows(); ++i) {
      double top = -kInf;
      for (long k = 0; k <= last; ++k) {
        top = std::max(top, profiles_(i, k) - scale * costs_[k]);
      }
      best[i] = top;
      const double at_edge = profiles_(i, last) - scale * costs_[last];
      edge = edge || (last > 0 && at_edge >= top - 1e-9 * std::max(1.0, std::abs(top)));
    }
    if (boundary != nullptr) *boundary = edge;
    return lambda * budget_ + PairwiseSum(best) / static_cast<double>(best.size());
  }

 private:
  const Matrix& profiles_;
  std::vector<double> costs_;
  double budget_ = 0.0;
  double order_;
  PenaltyConvention penalty_;
};

LambdaSolve MinimizeLambda(const DualFunction& f, const GridSpec& grid) {
  std::vector<double> lambdas = {0.0};
  const double ratio = std::pow(grid.lambda_max / grid.lambda_min,
                                1.0 / std::max(1, grid.lambda_points - 1));
  for (int j = 0; j < grid.lambda_points; ++j) {
    lambdas.push_back(grid.lambda_min * std::pow(ratio, j));
  }
  std::vector<double> values;
  for (double l : lambdas) values.push_back(f(l));
  // Follow a still-decreasing tail past the grid.
  while (values.back() < values[values.size() - 2] && lambdas.back() < 1e12) {
    lambdas.push_back(lambdas.back() * 10.0);
    values.push_back(f(lambdas.back()));
  }
  const size_t best = static_cast<size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  LambdaSolve out;
  out.coarse = values[best];
  double lo = best == 0 ? 0.0 : lambdas[best - 1];
  double hi = best + 1 < lambdas.size() ? lambdas[best + 1] : lambdas[best];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < grid.golden_iterations && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = f(b);
    }
  }
  out.lambda = fa <= fb ? a : b;
  out.value = std::min(fa, fb);
  if (values[best] < out.value) {
    out.value = values[best];
    out.lambda = lambdas[best];
  }
  f(out.lambda, &out.boundary);
  return out;
}

std::vector<Vector> FibonacciSphere(int count) {
  std::vector<Vector> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double radius = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vector d(3);
    d << radius * std::cos(golden * k), radius * std::sin(golden * k), z;
    out.push_back(d);
  }
  return out;
}

}  // namespace

void GridSpec::Validate() const {
  if (lambda_points < 2 || !(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
    throw OracleError("lambda grid must hold at least two sorted positive points");
  }
  if (!(box_radius > 0.0) || linear_magnitudes < 1 || geometric_magnitudes < 0 ||
      !(geometric_floor > 0.0 && geometric_floor < 1.0)) {
    throw OracleError("magnitude grid is empty or out of range");
  }
  if (max_expansions < 0 || dense_directions < 0) throw OracleError("negative grid budget");
}

void OracleProblem::Validate() const {
  if (data == nullptr || scm == nullptr) throw OracleError("oracle problem lacks data or model");
  data->Validate();
  if (data->size() == 0) throw OracleError("oracle problem has no samples");
  CheckDimension(data->dimension(), scm->size(), "dataset columns");
  CheckDimension(params.theta.size(), scm->size(), "theta");
  if (!(delta >= 0.0) || !(order >= 1.0) || std::isinf(order)) {
    throw OracleError("oracle needs delta >= 0 and a finite order >= 1");
  }
}

std::vector<Vector> ShiftDirections(int dimension, const NormSpec& norm, bool corners,
                                    int dense, uint64_t seed) {
  std::vector<Vector> raw;
  for (int j = 0; j < dimension; ++j) {
    for (double sign : {1.0, -1.0}) {
      Vector d = Vector::Zero(dimension);
      d[j] = sign;
      raw.push_back(d);
    }
  }
  if (corners && dimension > 1 && dimension <= 12) {
    for (long mask = 0; mask < (1L << dimension); ++mask) {
      Vector d(dimension);
      for (int j = 0; j < dimension; ++j) d[j] = (mask >> j) & 1 ? -1.0 : 1.0;
      raw.push_back(d);
    }
  }
  if (dimension == 2) {
    for (int k = 0; k < dense; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / dense;
      Vector d(2);
      d << std::cos(angle), std::sin(angle);
      raw.push_back(d);
    }
  } else if (dimension == 3) {
    for (auto& d : FibonacciSphere(dense)) raw.push_back(d);
  } else if (dimension > 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < dense; ++k) {
      Vector d(dimension);
      for (int j = 0; j < dimension; ++j) d[j] = normal(rng);
      raw.push_back(d);
    }
  }
  std::vector<Vector> out;
  for (auto& d : raw) {
    const double length = norm.Norm(d);
    if (length > 0.0) out.push_back(d / length);
  }
  return out;
}

std::vector<double> ShiftMagnitudes(double radius, int linear, int geometric, double floor) {
  std::vector<double> out = {0.0};
  for (int k = 1; k <= linear; ++k) out.push_back(radius * k / linear);
  for (int k = 0; k < geometric; ++k) {
    out.push_back(radius * std::pow(floor, static_cast<double>(k) / geometric));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix ShiftProfiles(const OracleProblem& problem, const std::vector<Vector>& directions,
                     const std::vector<double>& magnitudes, Execution execution) {
  problem.Validate();
  const std::vector<Vector> levels = LevelsOf(problem);
  const long n = problem.data->size();
  const long k = static_cast<long>(magnitudes.size());
  // Row-major so each sample owns a contiguous slot.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> table(n, k);
  if (execution == Execution::kParallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(MaxThreads())
    for (long i = 0; i < n; ++i) {
      try {
        ProfileRow(problem, levels, directions, magnitudes, i, table.row(i).data());
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long i = 0; i < n; ++i) {
      ProfileRow(problem, levels, directions, magnitudes, i, table.row(i).data());
    }
  }
  return table;
}

DualResult DualValueGrid(const OracleProblem& problem, const GridSpec& grid) {
  problem.Validate();
  grid.Validate();
  const int nx = static_cast<int>(problem.scm->nonsensitive().size());
  const auto directions =
      ShiftDirections(nx, problem.norm, grid.corners, grid.dense_directions, grid.seed);

  auto solve = [&](double radius) {
    const auto magnitudes = ShiftMagnitudes(radius, grid.linear_magnitudes,
                                            grid.geometric_magnitudes, grid.geometric_floor);
    const Matrix profiles = ShiftProfiles(problem, directions, magnitudes, grid.execution);
    const DualFunction f(profiles, magnitudes, problem.delta, problem.order, grid.penalty);
    return MinimizeLambda(f, grid);
  };

  DualResult result;
  double radius = grid.box_radius;
  LambdaSolve current = solve(radius);
  bool settled = !current.boundary;
  while (!settled && result.expansions < grid.max_expansions) {
    radius *= 2.0;
    const LambdaSolve next = solve(radius);
    ++result.expansions;
    const double change =
        std::abs(next.value - current.value) / std::max(1.0, std::abs(current.value));
    current = next;
    settled = !current.boundary || change <= grid.expansion_tolerance;
  }
  result.value = current.value;
  result.lambda_star = current.lambda;
  result.coarse_value = current.coarse;
  result.box_radius = radius;
  result.boundary_active = current.boundary;
  result.unbounded_suspected = !settled;
  return result;
}

PrimalResult PrimalValueOnSupport(const OracleProblem& problem, const Matrix& candidates,
                                  const Vector& candidate_labels) {
  problem.Validate();
  CheckDimension(candidates.cols(), problem.scm->size(), "candidate columns");
  CheckDimension(candidate_labels.size(), candidates.rows(), "candidate labels");
  const Dataset& data = *problem.data;
  const long n = data.size();
  const CfdfMetric metric(*problem.scm, problem.norm);
  const LatentTable sources(metric, data.features);
  const LatentTable targets(metric, candidates);

  std::vector<double> psi(static_cast<size_t>(candidates.rows()));
  for (long j = 0; j < candidates.rows(); ++j) {
    psi[j] = Psi(problem.loss, problem.params.Score(candidates.row(j).transpose()),
                 candidate_labels[j]);
  }
  // Per source, keep the candidates on the cost/loss Pareto front; the rest
  // never carry mass at an optimum.
  struct Move {
    long source;
    double cost;
    double value;
  };
  std::vector<Move> moves;
  for (long i = 0; i < n; ++i) {
    std::vector<std::pair<double, double>> options;
    for (long j = 0; j < candidates.rows(); ++j) {
      // Label changes cost +inf.
      if (candidate_labels[j] != data.labels[i]) continue;
      const double d = metric.LatentDistance(sources.Row(i), targets.Row(j));
      options.emplace_back(PowerOf(d, problem.order), psi[j]);
    }
    std::sort(options.begin(), options.end(), [](const auto& x, const auto& y) {
      return x.first < y.first || (x.first == y.first && x.second > y.second);
    });
    double running = -kInf;
    for (const auto& [cost, value] : options) {
      if (value > running) {
        moves.push_back({i, cost, value});
        running = value;
      }
    }
  }
  const long vars = static_cast<long>(moves.size());
  LinearProgram lp;
  lp.objective.resize(vars);
  lp.a_eq = Matrix::Zero(n, vars);
  lp.b_eq = Vector::Constant(n, 1.0 / static_cast<double>(n));
  lp.a_le = Matrix::Zero(1, vars);
  lp.b_le = Vector::Constant(1, std::pow(problem.delta, problem.order));
  for (long k = 0; k < vars; ++k) {
    lp.objective[k] = moves[k].value;
    lp.a_eq(moves[k].source, k) = 1.0;
    lp.a_le(0, k) = moves[k].cost;
  }
  const LpResult solved = SolveLp(lp);
  if (solved.status != LpResult::Status::kOptimal) {
    throw OracleError("primal LP did not reach an optimum");
  }
  return {solved.value, candidates.rows(), vars};
}

PrimalResult PrimalValueBrute(const OracleProblem& problem, const GridSpec& grid) {
  problem.Validate();
  grid.Validate();
  const Scm& scm = *problem.scm;
  const Dataset& data = *problem.data;
  const int nx = static_cast<int>(scm.nonsensitive().size());
  const auto directions =
      ShiftDirections(nx, problem.norm, grid.corners, grid.dense_directions, grid.seed);
  const auto magnitudes = ShiftMagnitudes(grid.box_radius, grid.linear_magnitudes,
                                          grid.geometric_magnitudes, grid.geometric_floor);
  const auto levels = LevelsOf(problem);
  std::vector<Vector> points;
  std::vector<double> labels;
  for (long j = 0; j < data.size(); ++j) {
    const Vector ux = NonsensitiveLatent(scm, data.Row(j));
    for (const auto& level : levels) {
      points.push_back(SemiLatentInversePacked(scm, PackSemiLatent(scm, level, ux)));
      labels.push_back(data.labels[j]);
      for (const auto& d : directions) {
        for (double r : magnitudes) {
          if (r == 0.0) continue;
          points.push_back(
              SemiLatentInversePacked(scm, PackSemiLatent(scm, level, ux + r * d)));
          labels.push_back(data.labels[j]);
        }
      }
    }
  }
  Matrix candidates(static_cast<long>(points.size()), scm.size());
  for (size_t k = 0; k < points.size(); ++k) candidates.row(static_cast<long>(k)) = points[k];
  return PrimalValueOnSupport(problem, candidates,
                              Eigen::Map<Vector>(labels.data(), labels.size()));
}

double OtCostDiscrete(const Vector& p_weights, const Vector& q_weights, const Matrix& cost,
                      double order) {
  CheckDimension(cost.rows(), p_weights.size(), "cost rows");
  CheckDimension(cost.cols(), q_weights.size(), "cost columns");
  if (!(order >= 1.0)) throw OracleError("transport order must be >= 1");
  for (const Vector* w : {&p_weights, &q_weights}) {
    if ((w->array() < 0.0).any()) throw OracleError("transport weights must be nonnegative");
    if (std::abs(w->sum() - 1.0) > 1e-12) {
      throw OracleError("transport weights must sum to 1");
    }
  }
  if ((cost.array() < 0.0).any() || !cost.allFinite()) {
    throw OracleError("transport costs must be finite and nonnegative");
  }
  const long n1 = p_weights.size(), n2 = q_weights.size();
  LinearProgram lp;
  lp.objective.resize(n1 * n2);
  lp.a_eq = Matrix::Zero(n1 + n2, n1 * n2);
  lp.b_eq.resize(n1 + n2);
  lp.b_eq << p_weights, q_weights;
  lp.a_le.resize(0, n1 * n2);
  lp.b_le.resize(0);
  for (long i = 0; i < n1; ++i) {
    for (long j = 0; j < n2; ++j) {
      const long k = i * n2 + j;
      lp.objective[k] = -PowerOf(cost(i, j), order);
      lp.a_eq(i, k) = 1.0;
      lp.a_eq(n1 + j, k) = 1.0;
    }
  }
  const LpResult solved = SolveLp(lp);
  if (solved.status != LpResult::Status::kOptimal) {
    throw OracleError("transport LP did not reach an optimum");
  }
  const double total = std::max(0.0, -solved.value);
  return order == 1.0 ? total : std::pow(total, 1.0 / order);
}

SandwichResult AdversarialSandwich(const OracleProblem& problem, int copies,
                                   double box_radius, const std::vector<double>& warm_start) {
  problem.Validate();
  if (copies < 1) throw OracleError("sandwich needs at least one copy");
  if (!(box_radius > 0.0)) throw OracleError("sandwich box radius must be positive");
  const Scm& scm = *problem.scm;
  if (!scm.is_linear()) throw ScmError("sandwich needs a linear SCM");
  const Dataset& data = *problem.data;
  const LossSpec& loss = problem.loss;
  const double p = problem.order;
  const long n = data.size();
  const long total = n * copies;

  const double kappa = LatentDualNorm(LinearMatrix(scm), scm, problem.norm, problem.params.theta);
  const TwinSet twins = TwinSet::Build(scm, data.features, LevelsOf(problem));
  std::vector<std::vector<double>> margins(static_cast<size_t>(n));
  double loss_max = 0.0;
  for (long i = 0; i < n; ++i) {
    for (long a = 0; a < twins.points[i].rows(); ++a) {
      const double t = loss.Margin(problem.params.Score(twins.points[i].row(a).transpose()),
                                   data.labels[i]);
      margins[i].push_back(t);
      loss_max = std::max({loss_max, loss.H(t - box_radius * kappa),
                           loss.H(t + box_radius * kappa)});
    }
  }
  // Worst loss reachable from sample i within latent radius r.
  auto phi = [&](long i, double r) {
    double best = 0.0;
    for (double t : margins[i]) {
      best = std::max({best, loss.H(t - r * kappa), loss.H(t + r * kappa)});
    }
    return PowerOf(best, loss.power());
  };

  // Allocation in units of r^p; index `total` is unused budget.
  const double cap = std::pow(box_radius, p);
  const double budget = static_cast<double>(total) * std::pow(problem.delta, p);
  std::vector<double> alloc(static_cast<size_t>(total) + 1, 0.0);
  if (static_cast<long>(warm_start.size()) * 2 == total) {
    for (long u = 0; u < total; ++u) {
      alloc[u] = std::min(cap, std::pow(warm_start[u / 2], p));
    }
  } else {
    for (long u = 0; u < total; ++u) alloc[u] = std::min(cap, budget / total);
  }
  double used = 0.0;
  for (long u = 0; u < total; ++u) used += alloc[u];
  alloc[total] = std::max(0.0, budget - used);

  auto gain = [&](long u, double b) {
    if (u == total) return 0.0;
    return phi(u / copies, p == 1.0 ? b : std::pow(b, 1.0 / p));
  };
  auto pair_value = [&](long u, long w, double bu, double pool) {
    return gain(u, bu) + gain(w, pool - bu);
  };

  constexpr int kMaxSweeps = 200;
  constexpr int kSearch = 64;
  bool improving = true;
  int sweep = 0;
  for (; sweep < kMaxSweeps && improving; ++sweep) {
    improving = false;
    for (long u = 0; u < total; ++u) {
      for (long w = u + 1; w <= total; ++w) {
        const double pool = alloc[u] + alloc[w];
        const double cap_w = w == total ? kInf : cap;
        const double lo = std::max(0.0, pool - cap_w);
        const double hi = std::min(cap, pool);
        if (hi <= lo) continue;
        const double now = pair_value(u, w, alloc[u], pool);
        double best_b = alloc[u], best = now;
        double step = (hi - lo) / kSearch;
        for (int s = 0; s <= kSearch; ++s) {
          const double b = s == kSearch ? hi : lo + s * step;
          const double value = pair_value(u, w, b, pool);
          if (value > best) {
            best = value;
            best_b = b;
          }
        }
        // Local refinement around the best grid point.
        double left = std::max(lo, best_b - step), right = std::min(hi, best_b + step);
        for (int it = 0; it < 60; ++it) {
          const double m1 = left + (right - left) / 3.0, m2 = right - (right - left) / 3.0;
          if (pair_value(u, w, m1, pool) >= pair_value(u, w, m2, pool)) {
            right = m2;
          } else {
            left = m1;
          }
        }
        const double mid = 0.5 * (left + right);
        if (pair_value(u, w, mid, pool) > best) {
          best = pair_value(u, w, mid, pool);
          best_b = mid;
        }
        if (best > now + 1e-13 * std::max(1.0, std::abs(now))) {
          alloc[u] = best_b;
          alloc[w] = pool - best_b;
          improving = true;
        }
      }
    }
  }
  if (improving) throw OracleError("sandwich allocation still improving after the sweep cap");

  SandwichResult out;
  out.copies = copies;
  std::vector<double> gains;
  for (long u = 0; u < total; ++u) {
    const double r = p == 1.0 ? alloc[u] : std::pow(alloc[u], 1.0 / p);
    out.radii.push_back(r);
    gains.push_back(phi(u / copies, r));
  }
  out.lower = PairwiseSum(gains) / static_cast<double>(total);
  const double pw = loss.power();
  out.lipschitz = pw * PowerOf(loss_max, pw - 1.0) * loss.Lipschitz() * kappa;
  out.offset = p == 1.0 ? 0.0
                        : out.lipschitz * (p - 1.0) * std::pow(p, -p / (p - 1.0));
  out.diameter = cap;
  out.upper = out.lower + (out.lipschitz * out.diameter + out.offset) / static_cast<double>(total);
  return out;
}

double FiniteSampleBound(const FiniteSampleInputs& in) {
  for (double x : {in.entropy_integral, in.lipschitz, in.bound, in.metric_bound, in.diameter,
                   in.delta, in.eta, in.samples}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error("bound inputs must be positive and finite");
  }
  if (!(in.order >= 1.0)) throw Error("order must be >= 1");
  if (!(in.epsilon > 0.0 && in.epsilon < 0.5)) throw Error("epsilon must lie in (0, 0.5)");
  const double p = in.order;
  const double c0 = 96.0 * in.entropy_integral;
  const double c1 = 96.0 * in.lipschitz * std::pow(in.diameter, p);
  const double c2 = 2.0 * p * in.lipschitz * std::pow(in.diameter, p - 1.0) * in.metric_bound;
  const double c3 = 2.0 * std::numbers::sqrt2 * in.bound;
  const double shrink = std::pow(in.delta, 1.0 - p);
  const double sum = c0 + c1 * shrink + c2 * shrink * std::pow(in.samples, 0.5 - in.eta) +
                     c3 * std::sqrt(std::log(2.0 / in.epsilon));
  return sum / std::sqrt(in.samples);
}

}  // namespace cfdro
