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

#ifndef CFDRO_SCM_H_
#define CFDRO_SCM_H_

// Additive-noise structural causal models.
//
// Every node i carries a structural equation V_i := f_i(V_pa(i)) + U_i.
// Sensitive nodes are listed explicitly. The "semi-latent" coordinates of a
// feature vector v keep v_i on sensitive nodes and replace every other entry
// by its exogenous value v_i - f_i(v_pa(i)); the inverse map re-evaluates the
// equations with the sensitive nodes treated as roots. Semi-latent vectors are
// stored "packed": one entry per node, in node order.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cfdro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Named scalar functions usable in additive structural equations.
struct UnaryFunction {
  std::string_view name;
  double (*value)(double);
  double (*derivative)(double);
};

// Returns nullptr when the name is not registered.
const UnaryFunction* FindUnaryFunction(std::string_view name);
std::vector<std::string_view> UnaryFunctionNames();

class StructuralEquation {
 public:
  using Function = std::function<double(std::span<const double>)>;
  using GradientFunction =
      std::function<void(std::span<const double>, std::span<double>)>;

  enum class Kind { kLinear, kAdditive, kCustom };

  // One summand c * phi(parent) of an additive equation. `slot` indexes the
  // node's parent list.
  struct Term {
    int slot = 0;
    std::string function = "identity";
    double coefficient = 1.0;
  };

  // Root equation: f == 0.
  StructuralEquation() = default;

  static StructuralEquation Linear(std::vector<double> coefficients);
  static StructuralEquation Additive(std::vector<Term> terms);
  // Arbitrary differentiable closure over the parent values. When no gradient
  // is supplied, central differences with step 1e-6 * (1 + |x|) are used.
  static StructuralEquation Custom(std::string id, Function f,
                                   GradientFunction gradient = {});

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::kLinear; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::string& id() const { return id_; }
  bool has_analytic_gradient() const {
    return kind_ != Kind::kCustom || static_cast<bool>(gradient_);
  }

  double Evaluate(std::span<const double> parents) const;
  void PartialDerivatives(std::span<const double> parents,
                          std::span<double> out) const;

 private:
  Kind kind_ = Kind::kLinear;
  std::vector<double> coefficients_;
  std::vector<Term> terms_;
  std::vector<const UnaryFunction*> resolved_;
  std::string id_;
  Function function_;
  GradientFunction gradient_;
};

struct ExogenousSpec {
  enum class Kind { kNone, kBernoulli, kNormal };
  Kind kind = Kind::kNone;
  double mean = 0.0;      // Bernoulli probability for kBernoulli.
  double variance = 1.0;  // Unused for kBernoulli.

  static ExogenousSpec Bernoulli(double p) { return {Kind::kBernoulli, p, 0.0}; }
  static ExogenousSpec Normal(double mean, double variance) {
    return {Kind::kNormal, mean, variance};
  }
};

struct ScmNode {
  std::string name;
  std::vector<int> parents;
  StructuralEquation equation;
  ExogenousSpec exogenous;
};

// Immutable after construction. Cycles, dangling parents, and bad sensitive
// indices are rejected here, so the operations below never re-check them.
class Scm {
 public:
  Scm(std::vector<ScmNode> nodes, std::vector<int> sensitive);

  int size() const { return static_cast<int>(nodes_.size()); }
  const ScmNode& node(int i) const { return nodes_.at(i); }
  const std::vector<ScmNode>& nodes() const { return nodes_; }
  const std::vector<int>& topological_order() const { return order_; }
  const std::vector<int>& sensitive() const { return sensitive_; }
  const std::vector<int>& nonsensitive() const { return nonsensitive_; }
  bool is_sensitive(int i) const { return sensitive_mask_.at(i); }
  bool is_linear() const;
  int IndexOf(std::string_view name) const;
  std::vector<std::string> names() const;

  // f_i evaluated on the parent entries of `values`.
  double EquationValue(int i, const Vector& values) const;

 private:
  std::vector<ScmNode> nodes_;
  std::vector<int> order_;
  std::vector<int> sensitive_;
  std::vector<int> nonsensitive_;
  std::vector<bool> sensitive_mask_;
};

// Semi-latent point split into its two blocks. `sensitive` follows
// Scm::sensitive(), `nonsensitive` follows Scm::nonsensitive().
struct SemiLatentPoint {
  Vector sensitive;
  Vector nonsensitive;
};

struct Intervention {
  int index = 0;
  double value = 0.0;
};

// F(u): evaluates v_i = f_i(v_pa(i)) + u_i in topological order.
Vector ReducedForm(const Scm& scm, const Vector& u);
// F^{-1}(v): u_i = v_i - f_i(v_pa(i)).
Vector Abduct(const Scm& scm, const Vector& v);

SemiLatentPoint SemiLatent(const Scm& scm, const Vector& v);
Vector SemiLatentPacked(const Scm& scm, const Vector& v);
// P_X(g(v)), ordered like Scm::nonsensitive().
Vector NonsensitiveLatent(const Scm& scm, const Vector& v);
Vector SemiLatentInverse(const Scm& scm, const SemiLatentPoint& point);
Vector SemiLatentInversePacked(const Scm& scm, const Vector& packed);
// Packs sensitive values `a` and non-sensitive latent `ux` into node order.
Vector PackSemiLatent(const Scm& scm, const Vector& a, const Vector& ux);

// Shift counterfactual in the parent-free model: g^{-1}(g(v) + (0, delta)).
// `delta` has either one entry per node (sensitive entries must be zero) or
// one entry per non-sensitive node.
Vector CounterfactualShift(const Scm& scm, const Vector& v, const Vector& delta);

// Abduction, then the targeted equations are replaced by constants and the
// reduced form is re-evaluated.
Vector CounterfactualHard(const Scm& scm, const Vector& v,
                          std::span<const Intervention> targets);

// One hard counterfactual per level; each level assigns every sensitive node.
std::vector<Vector> Twins(const Scm& scm, const Vector& v,
                          std::span<const Vector> levels);

// {0}, {1}, ..., {count-1} for a single sensitive node.
std::vector<Vector> IntegerLevels(int count);

// Sensitive nodes lose their parents and become roots; other equations are
// copied unchanged. Idempotent.
Scm ParentFree(const Scm& scm);

// Matrix of the linear map g^{-1}: v = M * packed semi-latent point.
Matrix LinearMatrix(const Scm& scm);

// d g^{-1} / d u_x at a packed semi-latent point; n x |nonsensitive|.
Matrix SemiLatentJacobian(const Scm& scm, const Vector& packed);

struct SampleTable {
  Matrix exogenous;  // one row per draw
  Matrix features;
};

SampleTable Sample(const Scm& scm, int n, uint64_t seed);
SampleTable Sample(const Scm& scm, int n, std::mt19937_64& rng);

}  // namespace cfdro

#endif  // CFDRO_SCM_H_
