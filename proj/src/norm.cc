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

#include "cfdro/norm.h"

#include <cmath>
#include <sstream>

#include "cfdro/error.h"

namespace cfdro {

NormSpec NormSpec::WeightedL2(Vector weights) {
  if (weights.size() == 0) throw SchemaError("weighted L2 norm needs weights");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw SchemaError("weighted L2 norm weights must be strictly positive");
    }
  }
  NormSpec spec(Kind::kWeightedL2);
  spec.weights_ = std::move(weights);
  return spec;
}

NormSpec NormSpec::Parse(std::string_view text) {
  if (text == "l1") return L1();
  if (text == "l2") return L2();
  if (text == "linf") return Linf();
  if (text.starts_with("wl2:")) {
    std::vector<double> values;
    std::stringstream in{std::string(text.substr(4))};
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw SchemaError("bad weight '" + item + "' in norm spec");
      }
    }
    return WeightedL2(Eigen::Map<Vector>(values.data(), values.size()));
  }
  throw SchemaError("unknown norm '" + std::string(text) +
                    "' (expected l1, l2, linf or wl2:w1,w2,...)");
}

std::string NormSpec::ToString() const {
  switch (kind_) {
    case Kind::kL1:
      return "l1";
    case Kind::kL2:
      return "l2";
    case Kind::kLinf:
      return "linf";
    case Kind::kWeightedL2: {
      std::ostringstream out;
      out.precision(17);
      out << "wl2:";
      for (long i = 0; i < weights_.size(); ++i) out << (i ? "," : "") << weights_[i];
      return out.str();
    }
  }
  return "l1";
}

void NormSpec::CheckWeights(long size) const {
  CheckDimension(size, weights_.size(), "weighted norm argument");
}

double NormSpec::Norm(const Vector& x) const {
  switch (kind_) {
    case Kind::kL1:
      return x.lpNorm<1>();
    case Kind::kL2:
      return x.norm();
    case Kind::kLinf:
      return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
    case Kind::kWeightedL2:
      CheckWeights(x.size());
      return std::sqrt((weights_.array() * x.array().square()).sum());
  }
  return 0.0;
}

double NormSpec::DualNorm(const Vector& x) const {
  switch (kind_) {
    case Kind::kL1:
      return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
    case Kind::kL2:
      return x.norm();
    case Kind::kLinf:
      return x.lpNorm<1>();
    case Kind::kWeightedL2:
      CheckWeights(x.size());
      return std::sqrt((x.array().square() / weights_.array()).sum());
  }
  return 0.0;
}

Vector NormSpec::DualMaximizer(const Vector& x) const {
  Vector z = Vector::Zero(x.size());
  const double dual = DualNorm(x);
  if (dual == 0.0) return z;
  switch (kind_) {
    case Kind::kL1: {
      Eigen::Index best = 0;
      x.cwiseAbs().maxCoeff(&best);
      z[best] = x[best] > 0 ? 1.0 : -1.0;
      return z;
    }
    case Kind::kL2:
      return x / dual;
    case Kind::kLinf:
      for (long i = 0; i < x.size(); ++i) z[i] = x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0);
      return z;
    case Kind::kWeightedL2:
      return (x.array() / weights_.array()).matrix() / dual;
  }
  return z;
}

double NormSpec::NormPow(const Vector& x, double p) const {
  const double r = Norm(x);
  return p == 1.0 ? r : std::pow(r, p);
}

}  // namespace cfdro
