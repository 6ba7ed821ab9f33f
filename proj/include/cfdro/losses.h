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

#ifndef CFDRO_LOSSES_H_
#define CFDRO_LOSSES_H_

#include <string>
#include <string_view>

#include "cfdro/scm.h"

namespace cfdro {

enum class LossFamily {
  kHinge,
  kAbsolute,
  kLowerPartialMoment,
  kTauInsensitive,
  kLogExponential,
  kHuber,
  kLogCosh,
  kQuantile,
  kSmoothHinge,
  kTruncatedPinball,
};

// Classification feeds h the margin t = y * (theta^T v + b); regression
// feeds it the residual t = y - theta^T v - b.
enum class LossMode { kRegression, kClassification };

struct ModelParams {
  Vector theta;
  double intercept = 0.0;

  double Score(const Vector& v) const;
};

// A margin or residual loss h(t), optionally raised to `power`.
//
// Config strings: "<family>[:key=value,...]" with keys tau, gamma, tau1,
// tau2, p (power) and mode (reg|cls). Examples: "hinge",
// "lpm:tau=0.5,p=2", "quantile:gamma=0.3".
class LossSpec {
 public:
  LossSpec() = default;
  explicit LossSpec(LossFamily family);
  static LossSpec Parse(std::string_view text);

  LossFamily family() const { return family_; }
  LossMode mode() const { return mode_; }
  double power() const { return power_; }
  double tau() const { return tau_; }
  double gamma() const { return gamma_; }
  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }

  LossSpec& set_mode(LossMode mode);
  LossSpec& set_power(double power);
  LossSpec& set_tau(double tau);
  LossSpec& set_gamma(double gamma);
  LossSpec& set_truncation(double tau1, double tau2);

  std::string name() const;
  std::string ToString() const;

  double H(double t) const;
  // Subgradient; kinks take the zero side (or the flat side).
  double HDerivative(double t) const;
  // Second derivative where it exists; zero on piecewise-linear pieces.
  double HSecond(double t) const;
  double Lipschitz() const { return 1.0; }
  // Twice continuously differentiable everywhere.
  bool IsSmooth() const;
  // Piecewise-linear families whose p-th power admits the exact
  // regularized closed form for any p >= 1.
  bool SupportsPower() const;
  // A minimizer of h; +infinity when h only decreases.
  double Argmin() const;

  double Margin(double score, double y) const;
  // d t / d score.
  double MarginSlope(double y) const;
  void CheckTarget(double y) const;

 private:
  LossFamily family_ = LossFamily::kHinge;
  LossMode mode_ = LossMode::kClassification;
  double power_ = 1.0;
  double tau_ = 0.0;
  double gamma_ = 0.5;
  double tau1_ = 0.5;
  double tau2_ = 1.0;
};

LossMode DefaultMode(LossFamily family);

// h(t) at the point, without the power.
double EvalLoss(const LossSpec& loss, const Vector& v, double y,
                const ModelParams& params);
// h(t)^power.
double EvalLossPow(const LossSpec& loss, const Vector& v, double y,
                   const ModelParams& params);
// Gradient of h(t)^power over (theta, b); the intercept entry is last.
Vector LossGradient(const LossSpec& loss, const Vector& v, double y,
                    const ModelParams& params);

// x^p with the p == 1 fast path and 0^p = 0.
double PowerOf(double x, double p);

}  // namespace cfdro

#endif  // CFDRO_LOSSES_H_
