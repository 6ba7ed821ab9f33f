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

#include "cfdro/fair_metric.h"

#include <cmath>
#include <limits>

#include "cfdro/error.h"

namespace cfdro {

ExtendedCost ExtendedCost::Finite(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error("finite cost must be a nonnegative real");
  }
  ExtendedCost cost;
  cost.value_ = value;
  return cost;
}

ExtendedCost ExtendedCost::Infinite() {
  ExtendedCost cost;
  cost.infinite_ = true;
  return cost;
}

double ExtendedCost::value() const {
  if (infinite_) throw Error("cost is infinite");
  return value_;
}

ExtendedCost ExtendedCost::operator+(const ExtendedCost& other) const {
  if (infinite_ || other.infinite_) return Infinite();
  const double sum = value_ + other.value_;
  return std::isfinite(sum) ? Finite(sum) : Infinite();
}

ExtendedCost ExtendedCost::operator*(double scale) const {
  if (!(scale >= 0.0)) throw Error("cost scale must be nonnegative");
  if (scale == 0.0) return Finite(0.0);
  if (infinite_) return Infinite();
  const double product = value_ * scale;
  return std::isfinite(product) ? Finite(product) : Infinite();
}

bool ExtendedCost::operator<(const ExtendedCost& other) const {
  if (infinite_) return false;
  if (other.infinite_) return true;
  return value_ < other.value_;
}

bool ExtendedCost::operator==(const ExtendedCost& other) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  return value_ == other.value_;
}

std::string ExtendedCost::ToString() const {
  return infinite_ ? "inf" : std::to_string(value_);
}

CfdfMetric::CfdfMetric(const Scm& scm, NormSpec norm)
    : scm_(&scm), norm_(std::move(norm)) {
  if (norm_.kind() == NormSpec::Kind::kWeightedL2) {
    CheckDimension(norm_.weights().size(), static_cast<long>(scm.nonsensitive().size()),
                   "norm weights");
  }
}

Vector CfdfMetric::Latent(const Vector& v) const {
  return NonsensitiveLatent(*scm_, v);
}

double CfdfMetric::Distance(const Vector& v, const Vector& v2) const {
  CheckDimension(v.size(), scm_->size(), "first point");
  CheckDimension(v2.size(), scm_->size(), "second point");
  return norm_.Norm(Latent(v) - Latent(v2));
}

double CfdfMetric::LatentDistance(const Vector& ux, const Vector& ux2) const {
  CheckDimension(ux2.size(), ux.size(), "latent point");
  return norm_.Norm(ux - ux2);
}

double CfdfDistance(const CfdfMetric& metric, const Vector& v, const Vector& v2) {
  return metric.Distance(v, v2);
}

double NaiveDistance(const NormSpec& norm, std::span<const int> features,
                     const Vector& v, const Vector& v2) {
  CheckDimension(v2.size(), v.size(), "second point");
  Vector diff(static_cast<long>(features.size()));
  for (size_t k = 0; k < features.size(); ++k) {
    const int i = features[k];
    if (i < 0 || i >= v.size()) throw DimensionError("feature index out of range");
    diff[static_cast<long>(k)] = v[i] - v2[i];
  }
  return norm.Norm(diff);
}

double NaiveDistance(const NormSpec& norm, const Scm& scm, const Vector& v,
                     const Vector& v2) {
  CheckDimension(v.size(), scm.size(), "first point");
  return NaiveDistance(norm, scm.nonsensitive(), v, v2);
}

void CheckLabel(int y) {
  if (y != 1 && y != -1) {
    throw SchemaError("label must be -1 or +1, got " + std::to_string(y));
  }
}

ExtendedCost CostZ(const CfdfMetric& metric, const LabeledPoint& z,
                   const LabeledPoint& z2) {
  CheckLabel(z.y);
  CheckLabel(z2.y);
  if (z.y != z2.y) return ExtendedCost::Infinite();
  return ExtendedCost::Finite(metric.Distance(z.v, z2.v));
}

LatentTable::LatentTable(const CfdfMetric& metric, const Matrix& points)
    : metric_(&metric) {
  CheckDimension(points.cols(), metric.scm().size(), "point table columns");
  const long nx = static_cast<long>(metric.scm().nonsensitive().size());
  latent_.resize(points.rows(), nx);
  for (long i = 0; i < points.rows(); ++i) {
    latent_.row(i) = metric.Latent(points.row(i).transpose()).transpose();
  }
}

double LatentTable::Distance(long i, long j) const {
  return metric_->LatentDistance(Row(i), Row(j));
}

double LatentTable::DistanceTo(long i, const Vector& v) const {
  return metric_->LatentDistance(Row(i), metric_->Latent(v));
}

}  // namespace cfdro
