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

#include "cfdro/objectives.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "cfdro/error.h"

namespace cfdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Conjugate exponent; 1 when p is infinite.
double Conjugate(double p) { return std::isinf(p) ? 1.0 : p / (p - 1.0); }

void AddRowGradient(Vector* g, const Vector& v, double scale) {
  const long n = v.size();
  g->head(n) += scale * v;
  (*g)[n] += scale;
}

}  // namespace

std::string TrainerKindName(TrainerKind kind) {
  switch (kind) {
    case TrainerKind::kErm:
      return "erm";
    case TrainerKind::kAdversarial:
      return "al";
    case TrainerKind::kRoss:
      return "ross";
    case TrainerKind::kCdroClosed:
      return "cdro_closed";
    case TrainerKind::kCdroFirstOrder:
      return "cdro_first_order";
  }
  return "erm";
}

TrainerKind ParseTrainerKind(const std::string& name) {
  for (TrainerKind kind : {TrainerKind::kErm, TrainerKind::kAdversarial, TrainerKind::kRoss,
                           TrainerKind::kCdroClosed, TrainerKind::kCdroFirstOrder}) {
    if (TrainerKindName(kind) == name) return kind;
  }
  throw SchemaError("unknown trainer kind '" + name + "'");
}

std::string TrainerConfig::DisplayName() const {
  return label.empty() ? TrainerKindName(kind) : label;
}

void TrainerConfig::Validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw SchemaError("delta must be >= 0");
  if (!(power >= 1.0)) throw SchemaError("transport order must be >= 1");
  if (optimizer.learning_rate <= 0.0 || optimizer.batch_size < 1 || optimizer.epochs < 0) {
    throw SchemaError("optimizer settings out of range");
  }
  if (kind == TrainerKind::kCdroFirstOrder) {
    if (power < 2.0) throw TrainingError("first-order objective needs transport order >= 2");
    if (!loss.IsSmooth()) {
      throw TrainingError("first-order objective needs a twice differentiable loss, got " +
                          loss.name());
    }
  } else if (std::isinf(power)) {
    throw SchemaError("infinite transport order is only supported by the first-order objective");
  }
  if (kind == TrainerKind::kCdroClosed && power > 1.0 && !loss.SupportsPower()) {
    throw TrainingError("closed form with order > 1 is not available for " + loss.name());
  }
}

std::vector<Vector> ObservedLevels(const Scm& scm, const Matrix& features) {
  const auto& sensitive = scm.sensitive();
  std::vector<std::vector<double>> seen;
  for (long i = 0; i < features.rows(); ++i) {
    std::vector<double> level;
    for (int s : sensitive) level.push_back(features(i, s));
    seen.push_back(std::move(level));
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  std::vector<Vector> out;
  for (auto& level : seen) out.push_back(Eigen::Map<Vector>(level.data(), level.size()));
  return out;
}

TwinSet TwinSet::Build(const Scm& scm, const Matrix& features, std::vector<Vector> levels) {
  if (levels.empty()) throw ScmError("twin construction needs at least one level");
  TwinSet set;
  set.levels = std::move(levels);
  const long k = static_cast<long>(set.levels.size());
  set.points.reserve(features.rows());
  for (long i = 0; i < features.rows(); ++i) {
    const Vector v = features.row(i).transpose();
    const auto twins = Twins(scm, v, set.levels);
    Matrix block(k, v.size());
    for (long a = 0; a < k; ++a) block.row(a) = twins[a].transpose();
    set.points.push_back(std::move(block));
    int own = -1;
    for (long a = 0; a < k && own < 0; ++a) {
      bool same = true;
      for (size_t j = 0; j < scm.sensitive().size(); ++j) {
        same = same && v[scm.sensitive()[j]] == set.levels[a][static_cast<long>(j)];
      }
      if (same) own = static_cast<int>(a);
    }
    // The own twin is v; keep it free of abduction round-off.
    if (own >= 0) set.points.back().row(own) = v.transpose();
    set.own_level.push_back(own);
  }
  return set;
}

int WorstTwin(const TwinSet& twins, long i, const LossSpec& loss, double y,
              const ModelParams& params) {
  const Matrix& block = twins.points.at(i);
  int best = 0;
  double best_value = -kInf;
  for (long a = 0; a < block.rows(); ++a) {
    const double value = loss.H(loss.Margin(params.Score(block.row(a).transpose()), y));
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(a);
    }
  }
  return best;
}

double CfSupRisk(const TwinSet& twins, const Vector& labels, const LossSpec& loss,
                 const ModelParams& params, double p) {
  if (twins.size() == 0) throw Error("empty dataset");
  CheckDimension(labels.size(), twins.size(), "labels");
  double total = 0.0;
  for (long i = 0; i < twins.size(); ++i) {
    const int a = WorstTwin(twins, i, loss, labels[i], params);
    const Vector v = twins.points[i].row(a).transpose();
    total += PowerOf(loss.H(loss.Margin(params.Score(v), labels[i])), p);
  }
  return total / static_cast<double>(twins.size());
}

double LatentDualNorm(const Matrix& m, const Scm& scm, const NormSpec& norm,
                      const Vector& theta) {
  const Vector full = m.transpose() * theta;
  Vector latent(static_cast<long>(scm.nonsensitive().size()));
  for (size_t j = 0; j < scm.nonsensitive().size(); ++j) {
    latent[static_cast<long>(j)] = full[scm.nonsensitive()[j]];
  }
  return norm.DualNorm(latent);
}

Vector ProjectNullspace(const Vector& theta, const Matrix& m, std::span<const int> sensitive) {
  CheckDimension(m.rows(), theta.size(), "projection matrix");
  Matrix c(static_cast<long>(sensitive.size()), m.rows());
  for (size_t j = 0; j < sensitive.size(); ++j) {
    c.row(static_cast<long>(j)) = m.col(sensitive[j]).transpose();
  }
  const Matrix gram = c * c.transpose();
  Eigen::FullPivLU<Matrix> lu(gram);
  if (lu.rank() < gram.rows()) {
    throw TrainingError("nullspace constraint is rank degenerate");
  }
  return theta - c.transpose() * lu.solve(c * theta);
}

Vector CfGradient(const Scm& scm, const Vector& v, double y, const ModelParams& params,
                  const LossSpec& loss) {
  loss.CheckTarget(y);
  const Matrix jac = SemiLatentJacobian(scm, SemiLatentPacked(scm, v));
  const double t = loss.Margin(params.Score(v), y);
  return loss.HDerivative(t) * loss.MarginSlope(y) * (jac.transpose() * params.theta);
}

Objective::Objective(const Dataset& data, const Scm& scm, TrainerConfig cfg,
                     std::vector<Vector> levels)
    : data_(&data), scm_(&scm), cfg_(std::move(cfg)) {
  cfg_.Validate();
  data.Validate();
  if (data.size() == 0) throw Error("empty dataset");
  CheckDimension(data.dimension(), scm.size(), "dataset columns");
  features_ = scm.nonsensitive();
  all_rows_.resize(static_cast<size_t>(data.size()));
  std::iota(all_rows_.begin(), all_rows_.end(), 0L);

  const bool closed = cfg_.kind == TrainerKind::kCdroClosed;
  const bool first_order = cfg_.kind == TrainerKind::kCdroFirstOrder;
  const bool nullspace = cfg_.constraint_mode == ConstraintMode::kNullspace;
  if ((closed || nullspace) && !scm.is_linear()) {
    throw ScmError("closed form and nullspace projection need a linear SCM");
  }
  if (closed || first_order) {
    if (levels.empty()) levels = ObservedLevels(scm, data.features);
    twins_ = TwinSet::Build(scm, data.features, std::move(levels));
  }
  if (scm.is_linear() && (closed || first_order || nullspace)) {
    matrix_ = LinearMatrix(scm);
    latent_map_.resize(matrix_.rows(), static_cast<long>(features_.size()));
    for (size_t j = 0; j < features_.size(); ++j) {
      latent_map_.col(static_cast<long>(j)) = matrix_.col(features_[j]);
    }
  }
  if (first_order && !scm.is_linear()) {
    jacobians_.resize(static_cast<size_t>(data.size()));
    for (long i = 0; i < data.size(); ++i) {
      const Vector ux = NonsensitiveLatent(scm, data.Row(i));
      for (const auto& level : twins_.levels) {
        jacobians_[i].push_back(SemiLatentJacobian(scm, PackSemiLatent(scm, level, ux)));
      }
    }
  }
}

double Objective::Value(const ModelParams& params) const {
  return Evaluate(params, all_rows_, nullptr);
}

double Objective::Value(const ModelParams& params, std::span<const long> rows) const {
  return Evaluate(params, rows, nullptr);
}

Vector Objective::Gradient(const ModelParams& params) const {
  return Gradient(params, all_rows_);
}

Vector Objective::Gradient(const ModelParams& params, std::span<const long> rows) const {
  Vector g;
  Evaluate(params, rows, &g);
  return g;
}

void Objective::Constrain(ModelParams* params) const {
  if (cfg_.constraint_mode == ConstraintMode::kNullspace) {
    params->theta = ProjectNullspace(params->theta, matrix_, scm_->sensitive());
  }
}

double Objective::Evaluate(const ModelParams& params, std::span<const long> rows,
                           Vector* gradient) const {
  if (rows.empty()) throw Error("objective needs at least one row");
  CheckDimension(params.theta.size(), dimension(), "theta");
  if (gradient != nullptr) *gradient = Vector::Zero(dimension() + 1);
  switch (cfg_.kind) {
    case TrainerKind::kErm:
      return Erm(params, rows, gradient);
    case TrainerKind::kAdversarial:
    case TrainerKind::kRoss:
      return Perturbed(params, rows, gradient);
    case TrainerKind::kCdroClosed:
      return Closed(params, rows, gradient);
    case TrainerKind::kCdroFirstOrder:
      return FirstOrder(params, rows, gradient);
  }
  return 0.0;
}

double Objective::Erm(const ModelParams& params, std::span<const long> rows, Vector* g) const {
  const LossSpec& loss = cfg_.loss;
  double total = 0.0;
  for (long i : rows) {
    const Vector v = data_->Row(i);
    total += EvalLossPow(loss, v, data_->labels[i], params);
    if (g != nullptr) *g += LossGradient(loss, v, data_->labels[i], params);
  }
  const double n = static_cast<double>(rows.size());
  if (g != nullptr) *g /= n;
  return total / n;
}

double Objective::TwinRisk(const ModelParams& params, std::span<const long> rows, double p,
                           Vector* g) const {
  const LossSpec& loss = cfg_.loss;
  double total = 0.0;
  for (long i : rows) {
    const double y = data_->labels[i];
    const int a = WorstTwin(twins_, i, loss, y, params);
    const Vector v = twins_.points[i].row(a).transpose();
    const double t = loss.Margin(params.Score(v), y);
    const double h = loss.H(t);
    total += PowerOf(h, p);
    if (g != nullptr) {
      double scale = loss.HDerivative(t) * loss.MarginSlope(y);
      if (p != 1.0) scale *= p * PowerOf(h, p - 1.0);
      AddRowGradient(g, v, scale);
    }
  }
  const double n = static_cast<double>(rows.size());
  if (g != nullptr) *g /= n;
  return total / n;
}

double Objective::Closed(const ModelParams& params, std::span<const long> rows,
                         Vector* g) const {
  const double p = cfg_.power;
  Vector risk_grad = Vector::Zero(dimension() + 1);
  double risk = 0.0;
  if (cfg_.constraint_mode == ConstraintMode::kNullspace) {
    const LossSpec& loss = cfg_.loss;
    for (long i : rows) {
      const Vector v = data_->Row(i);
      const double y = data_->labels[i];
      const double t = loss.Margin(params.Score(v), y);
      const double h = loss.H(t);
      risk += PowerOf(h, p);
      double scale = loss.HDerivative(t) * loss.MarginSlope(y);
      if (p != 1.0) scale *= p * PowerOf(h, p - 1.0);
      AddRowGradient(&risk_grad, v, scale);
    }
    risk /= static_cast<double>(rows.size());
    risk_grad /= static_cast<double>(rows.size());
  } else {
    risk = TwinRisk(params, rows, p, g != nullptr ? &risk_grad : nullptr);
  }
  const Vector latent = latent_map_.transpose() * params.theta;
  const double kappa = cfg_.norm.DualNorm(latent);
  const double lip = cfg_.loss.Lipschitz();
  const double root = p == 1.0 ? risk : std::pow(risk, 1.0 / p);
  const double base = root + cfg_.delta * lip * kappa;
  if (g != nullptr) {
    Vector reg = Vector::Zero(dimension() + 1);
    reg.head(dimension()) = cfg_.delta * lip * (latent_map_ * cfg_.norm.DualMaximizer(latent));
    if (p == 1.0) {
      *g = risk_grad + reg;
    } else {
      Vector inner = reg;
      if (risk > 0.0) inner += (std::pow(risk, 1.0 / p - 1.0) / p) * risk_grad;
      *g = p * std::pow(base, p - 1.0) * inner;
    }
  }
  return PowerOf(base, p);
}

double Objective::FirstOrder(const ModelParams& params, std::span<const long> rows,
                             Vector* g) const {
  const LossSpec& loss = cfg_.loss;
  const double q = Conjugate(cfg_.power);
  const double zeroth = TwinRisk(params, rows, 1.0, g);
  const bool linear = jacobians_.empty();

  double total = 0.0;
  Vector sum_grad = Vector::Zero(dimension() + 1);
  for (long i : rows) {
    const double y = data_->labels[i];
    const double slope = loss.MarginSlope(y);
    int best = 0;
    double best_value = -kInf;
    Vector best_grad;
    for (long a = 0; a < twins_.points[i].rows(); ++a) {
      const Matrix& jac = linear ? latent_map_ : jacobians_[i][a];
      const Vector v = twins_.points[i].row(a).transpose();
      const double t = loss.Margin(params.Score(v), y);
      const Vector pulled = jac.transpose() * params.theta;
      const Vector cf = loss.HDerivative(t) * slope * pulled;
      const double nrm = cfg_.norm.DualNorm(cf);
      const double value = PowerOf(nrm, q);
      if (value > best_value) {
        best_value = value;
        best = static_cast<int>(a);
      }
    }
    total += best_value;
    if (g == nullptr) continue;
    const Matrix& jac = linear ? latent_map_ : jacobians_[i][best];
    const Vector v = twins_.points[i].row(best).transpose();
    const double t = loss.Margin(params.Score(v), y);
    const Vector pulled = jac.transpose() * params.theta;
    const double c = loss.HDerivative(t) * slope;
    const Vector cf = c * pulled;
    const double nrm = cfg_.norm.DualNorm(cf);
    if (nrm == 0.0) continue;
    const Vector s = cfg_.norm.DualMaximizer(cf);
    const double outer = q == 1.0 ? 1.0 : q * std::pow(nrm, q - 1.0);
    // d ||c J^T theta||_* = c J s + (s . J^T theta) dc, dc = h'' slope^2 [v; 1]
    sum_grad.head(dimension()) += outer * c * (jac * s);
    AddRowGradient(&sum_grad, v, outer * s.dot(pulled) * loss.HSecond(t) * slope * slope);
  }
  const double n = static_cast<double>(rows.size());
  const double mean = total / n;
  const double term = q == 1.0 ? mean : std::pow(mean, 1.0 / q);
  if (g != nullptr && mean > 0.0) {
    const double chain = q == 1.0 ? 1.0 : std::pow(mean, 1.0 / q - 1.0) / q;
    *g += cfg_.delta * chain * (sum_grad / n);
  }
  return zeroth + cfg_.delta * term;
}

double Objective::Perturbed(const ModelParams& params, std::span<const long> rows,
                            Vector* g) const {
  const LossSpec& loss = cfg_.loss;
  const double pw = loss.power();
  Vector free_theta(static_cast<long>(features_.size()));
  for (size_t j = 0; j < features_.size(); ++j) {
    free_theta[static_cast<long>(j)] = params.theta[features_[j]];
  }
  const double radius = cfg_.delta * cfg_.norm.DualNorm(free_theta);
  Vector radius_grad = Vector::Zero(dimension() + 1);
  if (g != nullptr) {
    const Vector s = cfg_.norm.DualMaximizer(free_theta);
    for (size_t j = 0; j < features_.size(); ++j) {
      radius_grad[features_[j]] = cfg_.delta * s[static_cast<long>(j)];
    }
  }
  auto accumulate = [&](const Vector& v, double t, double slope, double sign, Vector* out) {
    // h(t + sign * radius)^pw where t has d t / d score = slope.
    const double h = loss.H(t);
    double scale = loss.HDerivative(t);
    if (pw != 1.0) scale *= pw * PowerOf(h, pw - 1.0);
    AddRowGradient(out, v, scale * slope);
    *out += (scale * sign) * radius_grad;
  };

  double total = 0.0;
  for (long i : rows) {
    const Vector v = data_->Row(i);
    const double y = data_->labels[i];
    const double score = params.Score(v);
    if (cfg_.kind == TrainerKind::kAdversarial) {
      const double t = loss.Margin(score, y);
      const double lo = t - radius, hi = t + radius;
      const bool up = loss.H(hi) > loss.H(lo);
      const double at = up ? hi : lo;
      total += PowerOf(loss.H(at), pw);
      if (g != nullptr) accumulate(v, at, loss.MarginSlope(y), up ? 1.0 : -1.0, g);
    } else {
      const double t = loss.Margin(score, y);
      total += PowerOf(loss.H(t), pw);
      if (g != nullptr) accumulate(v, t, loss.MarginSlope(y), 0.0, g);
      const double t_pos = loss.Margin(score, 1.0);
      const double lo = t_pos - radius, hi = t_pos + radius;
      const double target = loss.Argmin();
      const double at = std::clamp(target, lo, hi);
      total += PowerOf(loss.H(at), pw);
      if (g != nullptr) {
        if (target >= hi) {
          accumulate(v, hi, loss.MarginSlope(1.0), 1.0, g);
        } else if (target <= lo) {
          accumulate(v, lo, loss.MarginSlope(1.0), -1.0, g);
        }
      }
    }
  }
  const double n = static_cast<double>(rows.size());
  if (g != nullptr) *g /= n;
  return total / n;
}

double ErmObjective(const Dataset& data, const ModelParams& params, const LossSpec& loss) {
  if (data.size() == 0) throw Error("empty dataset");
  double total = 0.0;
  for (long i = 0; i < data.size(); ++i) {
    total += EvalLossPow(loss, data.Row(i), data.labels[i], params);
  }
  return total / static_cast<double>(data.size());
}

namespace {

double Bound(const Dataset& data, const Scm& scm, const ModelParams& params,
             TrainerConfig cfg, TrainerKind kind) {
  cfg.kind = kind;
  return Objective(data, scm, std::move(cfg)).Value(params);
}

// Perturbation objectives only need the non-sensitive column list.
Scm ColumnsOnly(const Dataset& data) {
  std::vector<ScmNode> nodes(static_cast<size_t>(data.dimension()));
  for (int j = 0; j < data.dimension(); ++j) nodes[j].name = data.columns[j].name;
  return Scm(std::move(nodes), data.SensitiveIndices());
}

}  // namespace

double CdroClosedObjective(const Dataset& data, const Scm& scm, const ModelParams& params,
                           const TrainerConfig& cfg) {
  return Bound(data, scm, params, cfg, TrainerKind::kCdroClosed);
}

double CdroFirstOrderObjective(const Dataset& data, const Scm& scm,
                               const ModelParams& params, const TrainerConfig& cfg) {
  return Bound(data, scm, params, cfg, TrainerKind::kCdroFirstOrder);
}

double AdversarialObjective(const Dataset& data, const ModelParams& params,
                            const TrainerConfig& cfg) {
  return Bound(data, ColumnsOnly(data), params, cfg, TrainerKind::kAdversarial);
}

double RossObjective(const Dataset& data, const ModelParams& params,
                     const TrainerConfig& cfg) {
  return Bound(data, ColumnsOnly(data), params, cfg, TrainerKind::kRoss);
}

}  // namespace cfdro
