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

#ifndef CFDRO_NORM_H_
#define CFDRO_NORM_H_

#include <string>
#include <string_view>

#include "cfdro/scm.h"

namespace cfdro {

// Norm on the non-sensitive latent coordinates, and its dual
// ||x||_* = sup { x^T z : ||z|| <= 1 }.
//
// Config strings: "l1" | "l2" | "linf" | "wl2:w1,w2,...".
class NormSpec {
 public:
  enum class Kind { kL1, kL2, kLinf, kWeightedL2 };

  NormSpec() = default;
  static NormSpec L1() { return NormSpec(Kind::kL1); }
  static NormSpec L2() { return NormSpec(Kind::kL2); }
  static NormSpec Linf() { return NormSpec(Kind::kLinf); }
  static NormSpec WeightedL2(Vector weights);
  static NormSpec Parse(std::string_view text);

  Kind kind() const { return kind_; }
  const Vector& weights() const { return weights_; }
  std::string ToString() const;

  double Norm(const Vector& x) const;
  double DualNorm(const Vector& x) const;

  // z with ||z|| = 1 and x^T z = ||x||_*; zero when x == 0. Also a
  // subgradient of the dual norm at x.
  Vector DualMaximizer(const Vector& x) const;

  // Norm raised to an integer-free power without overflow surprises.
  double NormPow(const Vector& x, double p) const;

 private:
  explicit NormSpec(Kind kind) : kind_(kind) {}
  void CheckWeights(long size) const;

  Kind kind_ = Kind::kL1;
  Vector weights_;
};

}  // namespace cfdro

#endif  // CFDRO_NORM_H_
