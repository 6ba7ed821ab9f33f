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

#include "cfdro/lp.h"

#include <cmath>
#include <vector>

#include "cfdro/error.h"

namespace cfdro {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr long kMaxIterations = 1000000;

class Tableau {
 public:
  Tableau(Matrix rows, std::vector<long> basis) : t_(std::move(rows)), basis_(std::move(basis)) {}

  long rows() const { return t_.rows() - 1; }
  long rhs() const { return t_.cols() - 1; }
  double value() const { return t_(rows(), rhs()); }
  const std::vector<long>& basis() const { return basis_; }
  double at(long r, long j) const { return t_(r, j); }

  // Objective row for maximizing `cost` (zero beyond its length).
  void SetObjective(const Vector& cost) {
    const long obj = rows();
    t_.row(obj).setZero();
    for (long j = 0; j < cost.size(); ++j) t_(obj, j) = -cost[j];
    for (long r = 0; r < rows(); ++r) {
      const long b = basis_[r];
      if (b < cost.size() && cost[b] != 0.0) t_.row(obj) += cost[b] * t_.row(r);
    }
  }

  void Pivot(long r, long j) {
    t_.row(r) /= t_(r, j);
    for (long k = 0; k <= rows(); ++k) {
      if (k != r && t_(k, j) != 0.0) t_.row(k) -= t_(k, j) * t_.row(r);
    }
    basis_[r] = j;
  }

  // Runs to optimality over columns [0, allowed). Returns false if unbounded.
  bool Optimize(long allowed, long* iterations) {
    while (true) {
      if (++*iterations > kMaxIterations) throw OracleError("simplex iteration cap reached");
      long enter = -1;
      for (long j = 0; j < allowed; ++j) {
        if (t_(rows(), j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      long leave = -1;
      double best = 0.0;
      for (long r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(r, rhs()) / a;
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      Pivot(leave, enter);
    }
  }

  void DropRow(long r) {
    Matrix next(t_.rows() - 1, t_.cols());
    next.topRows(r) = t_.topRows(r);
    next.bottomRows(t_.rows() - 1 - r) = t_.bottomRows(t_.rows() - 1 - r);
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
  }

 private:
  Matrix t_;
  std::vector<long> basis_;
};

}  // namespace

LpResult SolveLp(const LinearProgram& lp) {
  const long n = lp.objective.size();
  const long m_eq = lp.a_eq.rows();
  const long m_le = lp.a_le.rows();
  if (m_eq > 0) CheckDimension(lp.a_eq.cols(), n, "equality block");
  if (m_le > 0) CheckDimension(lp.a_le.cols(), n, "inequality block");
  CheckDimension(lp.b_eq.size(), m_eq, "equality right-hand side");
  CheckDimension(lp.b_le.size(), m_le, "inequality right-hand side");

  const long m = m_eq + m_le;
  const long structural = n + m_le;  // originals then slacks
  const long cols = structural + m + 1;
  Matrix t = Matrix::Zero(m + 1, cols);
  std::vector<long> basis(static_cast<size_t>(m));
  for (long r = 0; r < m; ++r) {
    double b = 0.0;
    if (r < m_eq) {
      t.row(r).head(n) = lp.a_eq.row(r);
      b = lp.b_eq[r];
    } else {
      const long k = r - m_eq;
      t.row(r).head(n) = lp.a_le.row(k);
      t(r, n + k) = 1.0;
      b = lp.b_le[k];
    }
    t(r, cols - 1) = b;
    if (b < 0) t.row(r) *= -1.0;
    t(r, structural + r) = 1.0;
    basis[r] = structural + r;
  }

  LpResult result;
  Tableau tab(std::move(t), std::move(basis));
  Vector phase1 = Vector::Zero(structural + m);
  phase1.tail(m).setConstant(-1.0);
  tab.SetObjective(phase1);
  tab.Optimize(structural + m, &result.iterations);
  double scale = 1.0;
  for (long r = 0; r < m; ++r) scale = std::max(scale, std::abs(tab.at(r, tab.rhs())));
  if (tab.value() < -1e-9 * scale) {
    result.status = LpResult::Status::kInfeasible;
    return result;
  }
  // Artificials left in the basis sit at zero; pivot them out or drop the
  // row they guard, which is then redundant.
  for (long r = tab.rows() - 1; r >= 0; --r) {
    if (tab.basis()[r] < structural) continue;
    long column = -1;
    for (long j = 0; j < structural && column < 0; ++j) {
      if (std::abs(tab.at(r, j)) > 1e-9) column = j;
    }
    if (column >= 0) {
      tab.Pivot(r, column);
    } else {
      tab.DropRow(r);
    }
  }

  Vector cost = Vector::Zero(structural);
  cost.head(n) = lp.objective;
  tab.SetObjective(cost);
  if (!tab.Optimize(structural, &result.iterations)) {
    result.status = LpResult::Status::kUnbounded;
    return result;
  }
  result.status = LpResult::Status::kOptimal;
  result.x = Vector::Zero(n);
  for (long r = 0; r < tab.rows(); ++r) {
    if (tab.basis()[r] < n) result.x[tab.basis()[r]] = tab.at(r, tab.rhs());
  }
  result.value = lp.objective.dot(result.x);
  return result;
}

}  // namespace cfdro
