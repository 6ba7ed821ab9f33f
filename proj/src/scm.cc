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

#include "cfdro/scm.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "cfdro/error.h"

namespace cfdro {
namespace {

double Identity(double x) { return x; }
double One(double) { return 1.0; }
double Square(double x) { return x * x; }
double TwoX(double x) { return 2.0 * x; }
double Cube(double x) { return x * x * x; }
double ThreeXSquared(double x) { return 3.0 * x * x; }
double Tanh(double x) { return std::tanh(x); }
double TanhDerivative(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}
double Sin(double x) { return std::sin(x); }
double Cos(double x) { return std::cos(x); }
double NegSin(double x) { return -std::sin(x); }
double Sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
double SigmoidDerivative(double x) {
  const double s = Sigmoid(x);
  return s * (1.0 - s);
}
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
double Exp(double x) { return std::exp(x); }

constexpr std::array<UnaryFunction, 9> kUnaryFunctions = {{
    {"identity", &Identity, &One},
    {"square", &Square, &TwoX},
    {"cube", &Cube, &ThreeXSquared},
    {"tanh", &Tanh, &TanhDerivative},
    {"sin", &Sin, &Cos},
    {"cos", &Cos, &NegSin},
    {"sigmoid", &Sigmoid, &SigmoidDerivative},
    {"softplus", &Softplus, &Sigmoid},
    {"exp", &Exp, &Exp},
}};

// Gathers parent values of node `i` from a full-length vector.
template <size_t kInline = 8>
class ParentValues {
 public:
  ParentValues(const std::vector<int>& parents, const Vector& values) {
    size_ = parents.size();
    if (size_ > kInline) heap_.resize(size_);
    double* out = data();
    for (size_t k = 0; k < size_; ++k) out[k] = values[parents[k]];
  }
  std::span<const double> span() const { return {data(), size_}; }

 private:
  double* data() { return size_ > kInline ? heap_.data() : inline_.data(); }
  const double* data() const {
    return size_ > kInline ? heap_.data() : inline_.data();
  }
  std::array<double, kInline> inline_{};
  std::vector<double> heap_;
  size_t size_ = 0;
};

}  // namespace

const UnaryFunction* FindUnaryFunction(std::string_view name) {
  for (const auto& fn : kUnaryFunctions) {
    if (fn.name == name) return &fn;
  }
  return nullptr;
}

std::vector<std::string_view> UnaryFunctionNames() {
  std::vector<std::string_view> names;
  for (const auto& fn : kUnaryFunctions) names.push_back(fn.name);
  return names;
}

StructuralEquation StructuralEquation::Linear(std::vector<double> coefficients) {
  StructuralEquation eq;
  eq.kind_ = Kind::kLinear;
  eq.coefficients_ = std::move(coefficients);
  return eq;
}

StructuralEquation StructuralEquation::Additive(std::vector<Term> terms) {
  StructuralEquation eq;
  eq.kind_ = Kind::kAdditive;
  for (const auto& term : terms) {
    const UnaryFunction* fn = FindUnaryFunction(term.function);
    if (fn == nullptr) {
      throw ScmError("unknown structural function '" + term.function + "'");
    }
    if (term.slot < 0) throw ScmError("negative parent slot in additive term");
    eq.resolved_.push_back(fn);
  }
  eq.terms_ = std::move(terms);
  return eq;
}

StructuralEquation StructuralEquation::Custom(std::string id, Function f,
                                              GradientFunction gradient) {
  if (!f) throw ScmError("custom structural equation '" + id + "' has no body");
  StructuralEquation eq;
  eq.kind_ = Kind::kCustom;
  eq.id_ = std::move(id);
  eq.function_ = std::move(f);
  eq.gradient_ = std::move(gradient);
  return eq;
}

double StructuralEquation::Evaluate(std::span<const double> parents) const {
  switch (kind_) {
    case Kind::kLinear: {
      double total = 0.0;
      for (size_t k = 0; k < coefficients_.size(); ++k) {
        total += coefficients_[k] * parents[k];
      }
      return total;
    }
    case Kind::kAdditive: {
      double total = 0.0;
      for (size_t k = 0; k < terms_.size(); ++k) {
        total += terms_[k].coefficient * resolved_[k]->value(parents[terms_[k].slot]);
      }
      return total;
    }
    case Kind::kCustom:
      return function_(parents);
  }
  return 0.0;
}

void StructuralEquation::PartialDerivatives(std::span<const double> parents,
                                            std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (kind_) {
    case Kind::kLinear:
      for (size_t k = 0; k < coefficients_.size(); ++k) out[k] = coefficients_[k];
      return;
    case Kind::kAdditive:
      for (size_t k = 0; k < terms_.size(); ++k) {
        const int slot = terms_[k].slot;
        out[slot] += terms_[k].coefficient * resolved_[k]->derivative(parents[slot]);
      }
      return;
    case Kind::kCustom:
      if (gradient_) {
        gradient_(parents, out);
        return;
      }
      {
        std::vector<double> probe(parents.begin(), parents.end());
        for (size_t k = 0; k < probe.size(); ++k) {
          const double x = probe[k];
          const double h = 1e-6 * (1.0 + std::abs(x));
          probe[k] = x + h;
          const double up = function_(probe);
          probe[k] = x - h;
          const double down = function_(probe);
          probe[k] = x;
          out[k] = (up - down) / (2.0 * h);
        }
      }
      return;
  }
}

Scm::Scm(std::vector<ScmNode> nodes, std::vector<int> sensitive)
    : nodes_(std::move(nodes)), sensitive_(std::move(sensitive)) {
  const int n = size();
  if (n == 0) throw ScmError("SCM has no nodes");
  if (sensitive_.empty()) throw ScmError("SCM needs at least one sensitive node");
  std::sort(sensitive_.begin(), sensitive_.end());
  if (std::adjacent_find(sensitive_.begin(), sensitive_.end()) != sensitive_.end()) {
    throw ScmError("duplicate sensitive index");
  }
  sensitive_mask_.assign(n, false);
  for (int s : sensitive_) {
    if (s < 0 || s >= n) {
      throw ScmError("sensitive index " + std::to_string(s) + " out of range");
    }
    sensitive_mask_[s] = true;
  }
  if (static_cast<int>(sensitive_.size()) == n) {
    throw ScmError("SCM needs at least one non-sensitive node");
  }
  for (int i = 0; i < n; ++i) {
    if (!sensitive_mask_[i]) nonsensitive_.push_back(i);
  }

  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i) {
    const ScmNode& node = nodes_[i];
    const int arity = static_cast<int>(node.parents.size());
    for (int p : node.parents) {
      if (p < 0 || p >= n) {
        throw ScmError("node '" + node.name + "' has parent index out of range");
      }
      if (p == i) throw ScmError("node '" + node.name + "' is its own parent");
      children[p].push_back(i);
      ++indegree[i];
    }
    const StructuralEquation& eq = node.equation;
    if (eq.kind() == StructuralEquation::Kind::kLinear &&
        static_cast<int>(eq.coefficients().size()) != arity) {
      if (!(eq.coefficients().empty() && arity == 0)) {
        throw ScmError("node '" + node.name + "': " +
                       std::to_string(eq.coefficients().size()) +
                       " coefficients for " + std::to_string(arity) + " parents");
      }
    }
    if (eq.kind() == StructuralEquation::Kind::kAdditive) {
      for (const auto& term : eq.terms()) {
        if (term.slot >= arity) {
          throw ScmError("node '" + node.name +
                         "' reads an undeclared parent slot " +
                         std::to_string(term.slot));
        }
      }
    }
  }
  // Kahn's algorithm; the queue is ordered by index so the order is canonical.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const int i = ready.top();
    ready.pop();
    order_.push_back(i);
    for (int c : children[i]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order_.size()) != n) {
    throw ScmError("causal graph contains a cycle");
  }
}

bool Scm::is_linear() const {
  return std::all_of(nodes_.begin(), nodes_.end(),
                     [](const ScmNode& node) { return node.equation.is_linear(); });
}

int Scm::IndexOf(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  throw ScmError("unknown node '" + std::string(name) + "'");
}

std::vector<std::string> Scm::names() const {
  std::vector<std::string> out;
  for (const auto& node : nodes_) out.push_back(node.name);
  return out;
}

double Scm::EquationValue(int i, const Vector& values) const {
  const ScmNode& node = nodes_[i];
  if (node.parents.empty()) return 0.0;
  ParentValues<> parents(node.parents, values);
  return node.equation.Evaluate(parents.span());
}

Vector ReducedForm(const Scm& scm, const Vector& u) {
  CheckDimension(u.size(), scm.size(), "exogenous vector");
  Vector v(scm.size());
  for (int i : scm.topological_order()) v[i] = scm.EquationValue(i, v) + u[i];
  return v;
}

Vector Abduct(const Scm& scm, const Vector& v) {
  CheckDimension(v.size(), scm.size(), "feature vector");
  Vector u(scm.size());
  for (int i = 0; i < scm.size(); ++i) u[i] = v[i] - scm.EquationValue(i, v);
  return u;
}

Vector SemiLatentPacked(const Scm& scm, const Vector& v) {
  CheckDimension(v.size(), scm.size(), "feature vector");
  Vector packed(scm.size());
  for (int i = 0; i < scm.size(); ++i) {
    packed[i] = scm.is_sensitive(i) ? v[i] : v[i] - scm.EquationValue(i, v);
  }
  return packed;
}

SemiLatentPoint SemiLatent(const Scm& scm, const Vector& v) {
  const Vector packed = SemiLatentPacked(scm, v);
  SemiLatentPoint point;
  point.sensitive.resize(scm.sensitive().size());
  point.nonsensitive.resize(scm.nonsensitive().size());
  for (size_t k = 0; k < scm.sensitive().size(); ++k) {
    point.sensitive[k] = packed[scm.sensitive()[k]];
  }
  for (size_t k = 0; k < scm.nonsensitive().size(); ++k) {
    point.nonsensitive[k] = packed[scm.nonsensitive()[k]];
  }
  return point;
}

Vector NonsensitiveLatent(const Scm& scm, const Vector& v) {
  CheckDimension(v.size(), scm.size(), "feature vector");
  const auto& idx = scm.nonsensitive();
  Vector ux(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    ux[k] = v[idx[k]] - scm.EquationValue(idx[k], v);
  }
  return ux;
}

Vector PackSemiLatent(const Scm& scm, const Vector& a, const Vector& ux) {
  CheckDimension(a.size(), static_cast<long>(scm.sensitive().size()),
                 "sensitive block");
  CheckDimension(ux.size(), static_cast<long>(scm.nonsensitive().size()),
                 "non-sensitive block");
  Vector packed(scm.size());
  for (size_t k = 0; k < scm.sensitive().size(); ++k) packed[scm.sensitive()[k]] = a[k];
  for (size_t k = 0; k < scm.nonsensitive().size(); ++k) {
    packed[scm.nonsensitive()[k]] = ux[k];
  }
  return packed;
}

Vector SemiLatentInversePacked(const Scm& scm, const Vector& packed) {
  CheckDimension(packed.size(), scm.size(), "semi-latent vector");
  Vector v(scm.size());
  for (int i : scm.topological_order()) {
    v[i] = scm.is_sensitive(i) ? packed[i] : scm.EquationValue(i, v) + packed[i];
  }
  return v;
}

Vector SemiLatentInverse(const Scm& scm, const SemiLatentPoint& point) {
  return SemiLatentInversePacked(
      scm, PackSemiLatent(scm, point.sensitive, point.nonsensitive));
}

Vector CounterfactualShift(const Scm& scm, const Vector& v, const Vector& delta) {
  Vector packed = SemiLatentPacked(scm, v);
  const auto& nonsensitive = scm.nonsensitive();
  if (delta.size() == scm.size()) {
    for (int s : scm.sensitive()) {
      if (delta[s] != 0.0) {
        throw DimensionError("shift has a nonzero sensitive component at node '" +
                             scm.node(s).name + "'");
      }
    }
    packed += delta;
  } else if (delta.size() == static_cast<long>(nonsensitive.size())) {
    for (size_t k = 0; k < nonsensitive.size(); ++k) packed[nonsensitive[k]] += delta[k];
  } else {
    throw DimensionError("shift vector has length " + std::to_string(delta.size()) +
                         "; expected " + std::to_string(scm.size()) + " or " +
                         std::to_string(nonsensitive.size()));
  }
  return SemiLatentInversePacked(scm, packed);
}

Vector CounterfactualHard(const Scm& scm, const Vector& v,
                          std::span<const Intervention> targets) {
  const Vector u = Abduct(scm, v);
  std::vector<int> fixed(scm.size(), 0);
  std::vector<double> value(scm.size(), 0.0);
  for (const auto& t : targets) {
    if (t.index < 0 || t.index >= scm.size()) {
      throw DimensionError("intervention index " + std::to_string(t.index) +
                           " out of range");
    }
    fixed[t.index] = 1;
    value[t.index] = t.value;
  }
  Vector out(scm.size());
  for (int i : scm.topological_order()) {
    out[i] = fixed[i] ? value[i] : scm.EquationValue(i, out) + u[i];
  }
  return out;
}

std::vector<Vector> Twins(const Scm& scm, const Vector& v,
                          std::span<const Vector> levels) {
  if (levels.empty()) throw DimensionError("twins need at least one sensitive level");
  const auto& sensitive = scm.sensitive();
  std::vector<Vector> twins;
  twins.reserve(levels.size());
  std::vector<Intervention> targets(sensitive.size());
  for (const Vector& level : levels) {
    CheckDimension(level.size(), static_cast<long>(sensitive.size()),
                   "sensitive level");
    for (size_t k = 0; k < sensitive.size(); ++k) {
      targets[k] = {sensitive[k], level[k]};
    }
    twins.push_back(CounterfactualHard(scm, v, targets));
  }
  return twins;
}

std::vector<Vector> IntegerLevels(int count) {
  std::vector<Vector> levels;
  for (int a = 0; a < count; ++a) levels.push_back(Vector::Constant(1, a));
  return levels;
}

Scm ParentFree(const Scm& scm) {
  std::vector<ScmNode> nodes = scm.nodes();
  for (int s : scm.sensitive()) {
    nodes[s].parents.clear();
    nodes[s].equation = StructuralEquation();
  }
  return Scm(std::move(nodes), scm.sensitive());
}

Matrix LinearMatrix(const Scm& scm) {
  if (!scm.is_linear()) {
    throw ScmError("linear map requested for an SCM with nonlinear equations");
  }
  const int n = scm.size();
  Matrix m = Matrix::Zero(n, n);
  for (int i : scm.topological_order()) {
    m(i, i) = 1.0;
    if (scm.is_sensitive(i)) continue;
    const ScmNode& node = scm.node(i);
    const auto& coef = node.equation.coefficients();
    for (size_t k = 0; k < node.parents.size(); ++k) {
      m.row(i) += coef[k] * m.row(node.parents[k]);
    }
  }
  return m;
}

Matrix SemiLatentJacobian(const Scm& scm, const Vector& packed) {
  const Vector v = SemiLatentInversePacked(scm, packed);
  const int n = scm.size();
  const auto& nonsensitive = scm.nonsensitive();
  std::vector<int> column(n, -1);
  for (size_t k = 0; k < nonsensitive.size(); ++k) column[nonsensitive[k]] = k;

  Matrix jac = Matrix::Zero(n, nonsensitive.size());
  std::vector<double> partials;
  for (int i : scm.topological_order()) {
    if (scm.is_sensitive(i)) continue;
    jac(i, column[i]) = 1.0;
    const ScmNode& node = scm.node(i);
    if (node.parents.empty()) continue;
    ParentValues<> parents(node.parents, v);
    partials.assign(node.parents.size(), 0.0);
    node.equation.PartialDerivatives(parents.span(), partials);
    for (size_t k = 0; k < node.parents.size(); ++k) {
      jac.row(i) += partials[k] * jac.row(node.parents[k]);
    }
  }
  return jac;
}

SampleTable Sample(const Scm& scm, int n, std::mt19937_64& rng) {
  if (n < 1) throw DimensionError("sample size must be at least 1");
  for (const auto& node : scm.nodes()) {
    if (node.exogenous.kind == ExogenousSpec::Kind::kNone) {
      throw ScmError("node '" + node.name + "' has no exogenous distribution");
    }
  }
  SampleTable table;
  table.exogenous.resize(n, scm.size());
  table.features.resize(n, scm.size());
  Vector u(scm.size());
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < scm.size(); ++i) {
      const ExogenousSpec& spec = scm.node(i).exogenous;
      if (spec.kind == ExogenousSpec::Kind::kBernoulli) {
        u[i] = std::bernoulli_distribution(spec.mean)(rng) ? 1.0 : 0.0;
      } else {
        u[i] = std::normal_distribution<double>(spec.mean,
                                                std::sqrt(spec.variance))(rng);
      }
    }
    table.exogenous.row(r) = u.transpose();
    table.features.row(r) = ReducedForm(scm, u).transpose();
  }
  return table;
}

SampleTable Sample(const Scm& scm, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Sample(scm, n, rng);
}

}  // namespace cfdro
