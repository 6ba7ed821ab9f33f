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

#include "cfdro/losses.h"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "cfdro/error.h"

namespace cfdro {
namespace {

struct FamilyName {
  LossFamily family;
  const char* name;
};

constexpr FamilyName kFamilies[] = {
    {LossFamily::kHinge, "hinge"},
    {LossFamily::kAbsolute, "absolute"},
    {LossFamily::kLowerPartialMoment, "lpm"},
    {LossFamily::kTauInsensitive, "tau_insensitive"},
    {LossFamily::kLogExponential, "log_exponential"},
    {LossFamily::kHuber, "huber"},
    {LossFamily::kLogCosh, "log_cosh"},
    {LossFamily::kQuantile, "quantile"},
    {LossFamily::kSmoothHinge, "smooth_hinge"},
    {LossFamily::kTruncatedPinball, "truncated_pinball"},
};

double Sign(double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); }

double ParseNumber(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size() && std::isfinite(value)) return value;
  } catch (const std::exception&) {
  }
  throw SchemaError("bad value '" + text + "' for loss parameter " + key);
}

}  // namespace

double ModelParams::Score(const Vector& v) const {
  CheckDimension(v.size(), theta.size(), "feature vector");
  return theta.dot(v) + intercept;
}

LossMode DefaultMode(LossFamily family) {
  switch (family) {
    case LossFamily::kHinge:
    case LossFamily::kLogExponential:
    case LossFamily::kSmoothHinge:
    case LossFamily::kTruncatedPinball:
      return LossMode::kClassification;
    default:
      return LossMode::kRegression;
  }
}

LossSpec::LossSpec(LossFamily family) : family_(family), mode_(DefaultMode(family)) {}

LossSpec& LossSpec::set_mode(LossMode mode) {
  mode_ = mode;
  return *this;
}

LossSpec& LossSpec::set_power(double power) {
  if (!(power >= 1.0) || !std::isfinite(power)) {
    throw SchemaError("loss power must be a finite value >= 1");
  }
  power_ = power;
  return *this;
}

LossSpec& LossSpec::set_tau(double tau) {
  if (!(tau >= 0.0)) throw SchemaError("tau must be nonnegative");
  tau_ = tau;
  return *this;
}

LossSpec& LossSpec::set_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw SchemaError("gamma must lie in (0, 1)");
  gamma_ = gamma;
  return *this;
}

LossSpec& LossSpec::set_truncation(double tau1, double tau2) {
  if (!(tau1 >= 0.0 && tau1 <= 1.0)) throw SchemaError("tau1 must lie in [0, 1]");
  if (!(tau2 >= 0.0)) throw SchemaError("tau2 must be nonnegative");
  tau1_ = tau1;
  tau2_ = tau2;
  return *this;
}

LossSpec LossSpec::Parse(std::string_view text) {
  const size_t colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const FamilyName* found = nullptr;
  for (const auto& entry : kFamilies) {
    if (head == entry.name) found = &entry;
  }
  if (head == "logexp") found = &kFamilies[4];
  if (found == nullptr) throw SchemaError("unknown loss family '" + head + "'");
  LossSpec spec(found->family);
  if (colon == std::string_view::npos) return spec;

  std::map<std::string, std::string> params;
  std::stringstream in{std::string(text.substr(colon + 1))};
  std::string item;
  while (std::getline(in, item, ',')) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos) throw SchemaError("loss parameter '" + item + "' lacks '='");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  double tau1 = spec.tau1_, tau2 = spec.tau2_;
  for (const auto& [key, value] : params) {
    if (key == "mode") {
      if (value == "reg") {
        spec.set_mode(LossMode::kRegression);
      } else if (value == "cls") {
        spec.set_mode(LossMode::kClassification);
      } else {
        throw SchemaError("loss mode must be reg or cls");
      }
    } else if (key == "p") {
      spec.set_power(ParseNumber(key, value));
    } else if (key == "tau") {
      spec.set_tau(ParseNumber(key, value));
    } else if (key == "gamma") {
      spec.set_gamma(ParseNumber(key, value));
    } else if (key == "tau1") {
      tau1 = ParseNumber(key, value);
    } else if (key == "tau2") {
      tau2 = ParseNumber(key, value);
    } else {
      throw SchemaError("unknown loss parameter '" + key + "'");
    }
  }
  spec.set_truncation(tau1, tau2);
  return spec;
}

std::string LossSpec::name() const {
  for (const auto& entry : kFamilies) {
    if (entry.family == family_) return entry.name;
  }
  return "hinge";
}

std::string LossSpec::ToString() const {
  std::ostringstream out;
  out.precision(17);
  out << name() << ":mode=" << (mode_ == LossMode::kRegression ? "reg" : "cls")
      << ",p=" << power_;
  switch (family_) {
    case LossFamily::kLowerPartialMoment:
    case LossFamily::kTauInsensitive:
      out << ",tau=" << tau_;
      break;
    case LossFamily::kQuantile:
      out << ",gamma=" << gamma_;
      break;
    case LossFamily::kTruncatedPinball:
      out << ",tau1=" << tau1_ << ",tau2=" << tau2_;
      break;
    default:
      break;
  }
  return out.str();
}

double LossSpec::H(double t) const {
  switch (family_) {
    case LossFamily::kHinge:
      return std::max(0.0, 1.0 - t);
    case LossFamily::kAbsolute:
      return std::abs(t);
    case LossFamily::kLowerPartialMoment:
      return std::max(0.0, t - tau_);
    case LossFamily::kTauInsensitive:
      return std::max(0.0, std::abs(t) - tau_);
    case LossFamily::kLogExponential:
      // log(1 + e^{-t}) without overflow on either tail.
      return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    case LossFamily::kHuber:
      return std::abs(t) <= 1.0 ? 0.5 * t * t : std::abs(t) - 0.5;
    case LossFamily::kLogCosh: {
      const double a = std::abs(t);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    case LossFamily::kQuantile:
      return t >= 0 ? gamma_ * t : -t;
    case LossFamily::kSmoothHinge:
      if (t >= 1.0) return 0.0;
      if (t > 0.0) return 0.5 * (1.0 - t) * (1.0 - t);
      return 0.5 - t;
    case LossFamily::kTruncatedPinball:
      if (t <= 1.0) return 1.0 - t;
      if (t < tau2_ + 1.0) return tau1_ * (t - 1.0);
      return tau1_ * tau2_;
  }
  return 0.0;
}

double LossSpec::HDerivative(double t) const {
  switch (family_) {
    case LossFamily::kHinge:
      return t < 1.0 ? -1.0 : 0.0;
    case LossFamily::kAbsolute:
      return Sign(t);
    case LossFamily::kLowerPartialMoment:
      return t > tau_ ? 1.0 : 0.0;
    case LossFamily::kTauInsensitive:
      return std::abs(t) > tau_ ? Sign(t) : 0.0;
    case LossFamily::kLogExponential:
      // -1 / (1 + e^t)
      return t > 0 ? -std::exp(-t) / (1.0 + std::exp(-t)) : -1.0 / (1.0 + std::exp(t));
    case LossFamily::kHuber:
      return std::abs(t) <= 1.0 ? t : Sign(t);
    case LossFamily::kLogCosh:
      return std::tanh(t);
    case LossFamily::kQuantile:
      return t > 0 ? gamma_ : (t < 0 ? -1.0 : 0.0);
    case LossFamily::kSmoothHinge:
      if (t >= 1.0) return 0.0;
      if (t > 0.0) return t - 1.0;
      return -1.0;
    case LossFamily::kTruncatedPinball:
      if (t < 1.0) return -1.0;
      if (t > 1.0 && t < tau2_ + 1.0) return tau1_;
      return 0.0;
  }
  return 0.0;
}

double LossSpec::HSecond(double t) const {
  switch (family_) {
    case LossFamily::kLogExponential: {
      const double s = 1.0 / (1.0 + std::exp(-std::abs(t)));
      return s * (1.0 - s);
    }
    case LossFamily::kHuber:
      return std::abs(t) < 1.0 ? 1.0 : 0.0;
    case LossFamily::kLogCosh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case LossFamily::kSmoothHinge:
      return t > 0.0 && t < 1.0 ? 1.0 : 0.0;
    default:
      return 0.0;
  }
}

bool LossSpec::IsSmooth() const {
  return family_ == LossFamily::kLogExponential || family_ == LossFamily::kLogCosh;
}

bool LossSpec::SupportsPower() const {
  switch (family_) {
    case LossFamily::kHinge:
    case LossFamily::kAbsolute:
    case LossFamily::kLowerPartialMoment:
    case LossFamily::kTauInsensitive:
      return true;
    default:
      return false;
  }
}

double LossSpec::Argmin() const {
  switch (family_) {
    case LossFamily::kHinge:
    case LossFamily::kSmoothHinge:
    case LossFamily::kTruncatedPinball:
      return 1.0;
    case LossFamily::kLowerPartialMoment:
      return tau_;
    case LossFamily::kLogExponential:
      return std::numeric_limits<double>::infinity();
    default:
      return 0.0;
  }
}

void LossSpec::CheckTarget(double y) const {
  if (!std::isfinite(y)) throw SchemaError("target must be finite");
  if (mode_ == LossMode::kClassification && y != 1.0 && y != -1.0) {
    throw SchemaError("classification label must be -1 or +1");
  }
}

double LossSpec::Margin(double score, double y) const {
  return mode_ == LossMode::kClassification ? y * score : y - score;
}

double LossSpec::MarginSlope(double y) const {
  return mode_ == LossMode::kClassification ? y : -1.0;
}

double PowerOf(double x, double p) {
  if (p == 1.0) return x;
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

double EvalLoss(const LossSpec& loss, const Vector& v, double y,
                const ModelParams& params) {
  loss.CheckTarget(y);
  return loss.H(loss.Margin(params.Score(v), y));
}

double EvalLossPow(const LossSpec& loss, const Vector& v, double y,
                   const ModelParams& params) {
  return PowerOf(EvalLoss(loss, v, y, params), loss.power());
}

Vector LossGradient(const LossSpec& loss, const Vector& v, double y,
                    const ModelParams& params) {
  loss.CheckTarget(y);
  const double t = loss.Margin(params.Score(v), y);
  double scale = loss.HDerivative(t) * loss.MarginSlope(y);
  if (loss.power() != 1.0) {
    scale *= loss.power() * PowerOf(loss.H(t), loss.power() - 1.0);
  }
  Vector grad(v.size() + 1);
  grad.head(v.size()) = scale * v;
  grad[v.size()] = scale;
  return grad;
}

}  // namespace cfdro
