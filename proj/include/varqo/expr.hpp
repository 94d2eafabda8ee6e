#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>

#include "varqo/common.hpp"

namespace varqo {

// Named scalar parameter. The label disambiguates otherwise identical
// variable sets, e.g. when a solver re-instantiates the same ansatz in
// several rounds; equality and ordering are on the (name, label) pair.
struct Variable {
  std::string name;
  std::string label;

  Variable() = default;
  explicit Variable(std::string name_, std::string label_ = "")
      : name(std::move(name_)), label(std::move(label_)) {}

  bool operator==(const Variable& o) const noexcept {
    return name == o.name && label == o.label;
  }
  bool operator!=(const Variable& o) const noexcept { return !(*this == o); }
  bool operator<(const Variable& o) const noexcept {
    return name != o.name ? name < o.name : label < o.label;
  }

  // "name" or "name@label"; parse_variable inverts this.
  std::string to_string() const {
    return label.empty() ? name : name + "@" + label;
  }
  static Variable parse(const std::string& text);
};

struct VariableHash {
  std::size_t operator()(const Variable& v) const noexcept {
    std::size_t h = std::hash<std::string>{}(v.name);
    detail::hash_combine(h, std::hash<std::string>{}(v.label));
    return h;
  }
};

using Assignment = std::map<Variable, double>;
using HandleValues = std::unordered_map<std::uint64_t, double>;

enum class UnaryFn { Neg, Exp, Log, Sin, Cos, Tan, Sqrt, Square, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

// Immutable real-valued expression DAG over variables and expectation-value
// handles. Nodes are shared; all transformations return new expressions and
// preserve sharing, so repeated subterms stay merged under differentiation.
class Expr {
 public:
  Expr();  // constant 0.0
  Expr(double value);          // NOLINT: implicit by design
  Expr(const Variable& v);     // NOLINT: implicit by design

  static Expr constant(double v);
  static Expr variable(const Variable& v);
  // Placeholder for the value of the expectation value registered under
  // `handle` in the objective module's global table.
  static Expr expectation(std::uint64_t handle);
  // d(expectation `handle`)/d(v): produced by differentiate, consumed by the
  // objective module's shift-rule resolution. Cannot be evaluated directly.
  static Expr gradient_marker(std::uint64_t handle, const Variable& v);

  bool is_constant() const noexcept;
  double constant_value() const;
  bool is_variable() const noexcept;
  const Variable& variable_ref() const;
  bool is_zero() const noexcept;

  double evaluate(const Assignment& vars) const;
  double evaluate(const Assignment& vars, const HandleValues& evals) const;

  // Symbolic derivative. Expectation handles become gradient markers; the
  // derivative of abs on an active path is rejected (not differentiable
  // everywhere), and a variable that does not occur yields constant 0.
  Expr differentiate(const Variable& v) const;

  Expr map_variables(const std::map<Variable, Variable>& renaming) const;
  Expr substitute(const std::map<Variable, Expr>& replacements) const;
  Expr resolve_markers(
      const std::function<Expr(std::uint64_t, const Variable&)>& resolve) const;
  // Rewrites expectation handles (and the handle carried by gradient
  // markers) through `remap`. Used when the circuit behind a handle is
  // replaced and the expression must point at the new registration.
  Expr map_handles(
      const std::function<std::uint64_t(std::uint64_t)>& remap) const;

  void collect_variables(std::set<Variable>& out) const;
  std::set<Variable> variables() const;
  void collect_handles(std::set<std::uint64_t>& out) const;
  std::set<std::uint64_t> handles() const;
  bool has_markers() const noexcept;
  bool depends_on(const Variable& v) const;

  std::size_t structural_hash() const noexcept;
  bool same_structure(const Expr& other) const noexcept;

  std::string to_string() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  friend Expr pow(const Expr& base, const Expr& exponent);
  friend Expr apply_unary(UnaryFn fn, const Expr& a);

  // Opaque DAG node; defined in expr.cpp.
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

 private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}

  NodePtr node_;
};

Expr pow(const Expr& base, const Expr& exponent);
Expr apply_unary(UnaryFn fn, const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr sqrt(const Expr& a);
Expr square(const Expr& a);
Expr abs(const Expr& a);

const char* unary_fn_name(UnaryFn fn);

}  // namespace varqo
