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

#ifndef CFDRO_FAIR_METRIC_H_
#define CFDRO_FAIR_METRIC_H_

#include <span>
#include <string>

#include "cfdro/norm.h"
#include "cfdro/scm.h"

namespace cfdro {

// Nonnegative cost that may be +infinity. Kept apart from double so that
// an infinite label cost never gets truncated by a finite cap.
class ExtendedCost {
 public:
  ExtendedCost() = default;
  static ExtendedCost Finite(double value);
  static ExtendedCost Infinite();

  bool is_infinite() const { return infinite_; }
  // Throws when infinite.
  double value() const;

  ExtendedCost operator+(const ExtendedCost& other) const;
  ExtendedCost operator*(double scale) const;  // scale >= 0; 0 * inf = 0
  bool operator<(const ExtendedCost& other) const;
  bool operator==(const ExtendedCost& other) const;
  std::string ToString() const;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

// d(v, v') = ||P_X g(v) - P_X g(v')|| on an additive-noise SCM.
class CfdfMetric {
 public:
  CfdfMetric(const Scm& scm, NormSpec norm);

  const Scm& scm() const { return *scm_; }
  const NormSpec& norm() const { return norm_; }

  Vector Latent(const Vector& v) const;
  double Distance(const Vector& v, const Vector& v2) const;
  double LatentDistance(const Vector& ux, const Vector& ux2) const;

 private:
  const Scm* scm_;
  NormSpec norm_;
};

double CfdfDistance(const CfdfMetric& metric, const Vector& v, const Vector& v2);

// Norm of the non-sensitive feature difference with no causal correction.
double NaiveDistance(const NormSpec& norm, const Scm& scm, const Vector& v,
                     const Vector& v2);
double NaiveDistance(const NormSpec& norm, std::span<const int> features,
                     const Vector& v, const Vector& v2);

struct LabeledPoint {
  Vector v;
  int y = 1;
};

// d(v, v') when labels agree, +infinity otherwise.
ExtendedCost CostZ(const CfdfMetric& metric, const LabeledPoint& z,
                   const LabeledPoint& z2);

void CheckLabel(int y);

// Abductions for a fixed table of points, computed once.
class LatentTable {
 public:
  LatentTable(const CfdfMetric& metric, const Matrix& points);

  long size() const { return latent_.rows(); }
  Vector Row(long i) const { return latent_.row(i).transpose(); }
  double Distance(long i, long j) const;
  double DistanceTo(long i, const Vector& v) const;

 private:
  const CfdfMetric* metric_;
  Matrix latent_;
};

}  // namespace cfdro

#endif  // CFDRO_FAIR_METRIC_H_
