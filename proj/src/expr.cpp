#include "varqo/expr.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>

namespace varqo {

namespace {

enum class Kind { Constant, Var, Handle, Marker, Unary, Binary };

}  // namespace

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;           // Constant
  Variable var;                 // Var, Marker
  std::uint64_t handle = 0;     // Handle, Marker
  UnaryFn fn = UnaryFn::Neg;    // Unary
  BinaryOp op = BinaryOp::Add;  // Binary
  NodePtr a, b;
  std::size_t hash = 0;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

std::size_t node_hash(const Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x9e3779b9u;
  switch (n.kind) {
    case Kind::Constant:
      detail::hash_combine(h, detail::hash_double(n.value));
      break;
    case Kind::Var:
      detail::hash_combine(h, VariableHash{}(n.var));
      break;
    case Kind::Handle:
      detail::hash_combine(h, std::hash<std::uint64_t>{}(n.handle));
      break;
    case Kind::Marker:
      detail::hash_combine(h, std::hash<std::uint64_t>{}(n.handle));
      detail::hash_combine(h, VariableHash{}(n.var));
      break;
    case Kind::Unary:
      detail::hash_combine(h, static_cast<std::size_t>(n.fn));
      detail::hash_combine(h, n.a->hash);
      break;
    case Kind::Binary:
      detail::hash_combine(h, static_cast<std::size_t>(n.op));
      detail::hash_combine(h, n.a->hash);
      detail::hash_combine(h, n.b->hash);
      break;
  }
  return h;
}

NodePtr finish(Node n) {
  n.hash = node_hash(n);
  return std::make_shared<const Node>(std::move(n));
}

NodePtr make_constant_node(double v) {
  Node n;
  n.kind = Kind::Constant;
  n.value = v;
  return finish(std::move(n));
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}

bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

// Evaluation of a unary tag; `strict` throws on domain violations, otherwise
// the caller treats the result as "do not fold".
double eval_unary(UnaryFn fn, double x, bool strict) {
  switch (fn) {
    case UnaryFn::Neg:
      return -x;
    case UnaryFn::Exp:
      return std::exp(x);
    case UnaryFn::Log:
      if (x <= 0.0) {
        if (strict)
          throw std::domain_error(detail::str(
              "expression domain error: log(", format_double(x), ")"));
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::log(x);
    case UnaryFn::Sin:
      return std::sin(x);
    case UnaryFn::Cos:
      return std::cos(x);
    case UnaryFn::Tan:
      return std::tan(x);
    case UnaryFn::Sqrt:
      if (x < 0.0) {
        if (strict)
          throw std::domain_error(detail::str(
              "expression domain error: sqrt(", format_double(x), ")"));
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::sqrt(x);
    case UnaryFn::Square:
      return x * x;
    case UnaryFn::Abs:
      return std::abs(x);
  }
  throw std::logic_error("unknown unary tag");
}

double eval_binary(BinaryOp op, double x, double y, bool strict) {
  switch (op) {
    case BinaryOp::Add:
      return x + y;
    case BinaryOp::Sub:
      return x - y;
    case BinaryOp::Mul:
      return x * y;
    case BinaryOp::Div:
      if (y == 0.0) {
        if (strict)
          throw std::domain_error("expression domain error: division by zero");
        return std::numeric_limits<double>::quiet_NaN();
      }
      return x / y;
    case BinaryOp::Pow: {
      if (x < 0.0 && y != std::floor(y)) {
        if (strict)
          throw std::domain_error(detail::str(
              "expression domain error: pow(", format_double(x), ", ",
              format_double(y), ") with negative base and non-integer exponent"));
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (x == 0.0 && y < 0.0) {
        if (strict)
          throw std::domain_error(
              "expression domain error: zero base raised to negative power");
        return std::numeric_limits<double>::quiet_NaN();
      }
      return std::pow(x, y);
    }
  }
  throw std::logic_error("unknown binary tag");
}

NodePtr make_unary_node(UnaryFn fn, NodePtr a) {
  if (is_const(a)) {
    double v = eval_unary(fn, a->value, /*strict=*/false);
    if (std::isfinite(v)) return make_constant_node(v);
  }
  if (fn == UnaryFn::Neg && a->kind == Kind::Unary && a->fn == UnaryFn::Neg)
    return a->a;  // neg(neg(x)) = x, keeps dagger(dagger(U)) structural
  Node n;
  n.kind = Kind::Unary;
  n.fn = fn;
  n.a = std::move(a);
  return finish(std::move(n));
}

NodePtr make_binary_node(BinaryOp op, NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) {
    double v = eval_binary(op, a->value, b->value, /*strict=*/false);
    if (std::isfinite(v)) return make_constant_node(v);
  }
  switch (op) {
    case BinaryOp::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case BinaryOp::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary_node(UnaryFn::Neg, std::move(b));
      if (a == b) return make_constant_node(0.0);
      break;
    case BinaryOp::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant_node(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return make_unary_node(UnaryFn::Neg, std::move(b));
      if (is_const(b, -1.0)) return make_unary_node(UnaryFn::Neg, std::move(a));
      break;
    case BinaryOp::Div:
      if (is_const(a, 0.0)) return make_constant_node(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case BinaryOp::Pow:
      if (is_const(b, 0.0)) return make_constant_node(1.0);
      if (is_const(b, 1.0)) return a;
      if (is_const(a, 1.0)) return make_constant_node(1.0);
      break;
  }
  Node n;
  n.kind = Kind::Binary;
  n.op = op;
  n.a = std::move(a);
  n.b = std::move(b);
  return finish(std::move(n));
}

double eval_node(const Node* n, const Assignment& vars,
                 const HandleValues& evals,
                 std::unordered_map<const Node*, double>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  double v = 0.0;
  switch (n->kind) {
    case Kind::Constant:
      v = n->value;
      break;
    case Kind::Var: {
      auto vit = vars.find(n->var);
      if (vit == vars.end())
        throw std::invalid_argument(
            detail::str("unassigned variable '", n->var.to_string(),
                        "' in expression evaluation"));
      v = vit->second;
      break;
    }
    case Kind::Handle: {
      auto hit = evals.find(n->handle);
      if (hit == evals.end())
        throw std::invalid_argument(detail::str(
            "missing expectation value for handle ", n->handle));
      v = hit->second;
      break;
    }
    case Kind::Marker:
      throw std::logic_error(
          "unresolved gradient marker cannot be evaluated; resolve it through "
          "the objective module first");
    case Kind::Unary:
      v = eval_unary(n->fn, eval_node(n->a.get(), vars, evals, memo),
                     /*strict=*/true);
      break;
    case Kind::Binary:
      v = eval_binary(n->op, eval_node(n->a.get(), vars, evals, memo),
                      eval_node(n->b.get(), vars, evals, memo),
                      /*strict=*/true);
      break;
  }
  memo.emplace(n, v);
  return v;
}

NodePtr diff_node(const NodePtr& n, const Variable& v,
                  std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr d;
  switch (n->kind) {
    case Kind::Constant:
      d = make_constant_node(0.0);
      break;
    case Kind::Var:
      d = make_constant_node(n->var == v ? 1.0 : 0.0);
      break;
    case Kind::Handle: {
      Node m;
      m.kind = Kind::Marker;
      m.handle = n->handle;
      m.var = v;
      d = finish(std::move(m));
      break;
    }
    case Kind::Marker:
      throw std::logic_error(
          "cannot differentiate an unresolved gradient marker");
    case Kind::Unary: {
      NodePtr da = diff_node(n->a, v, memo);
      if (is_const(da, 0.0)) {
        d = da;
        break;
      }
      const NodePtr& x = n->a;
      switch (n->fn) {
        case UnaryFn::Neg:
          d = make_unary_node(UnaryFn::Neg, da);
          break;
        case UnaryFn::Exp:
          d = make_binary_node(BinaryOp::Mul,
                               make_unary_node(UnaryFn::Exp, x), da);
          break;
        case UnaryFn::Log:
          d = make_binary_node(BinaryOp::Div, da, x);
          break;
        case UnaryFn::Sin:
          d = make_binary_node(BinaryOp::Mul,
                               make_unary_node(UnaryFn::Cos, x), da);
          break;
        case UnaryFn::Cos:
          d = make_unary_node(
              UnaryFn::Neg,
              make_binary_node(BinaryOp::Mul,
                               make_unary_node(UnaryFn::Sin, x), da));
          break;
        case UnaryFn::Tan:
          // d tan = (1 + tan^2) dx
          d = make_binary_node(
              BinaryOp::Mul,
              make_binary_node(
                  BinaryOp::Add, make_constant_node(1.0),
                  make_unary_node(UnaryFn::Square,
                                  make_unary_node(UnaryFn::Tan, x))),
              da);
          break;
        case UnaryFn::Sqrt:
          d = make_binary_node(
              BinaryOp::Div, da,
              make_binary_node(BinaryOp::Mul, make_constant_node(2.0),
                               make_unary_node(UnaryFn::Sqrt, x)));
          break;
        case UnaryFn::Square:
          d = make_binary_node(
              BinaryOp::Mul,
              make_binary_node(BinaryOp::Mul, make_constant_node(2.0), x), da);
          break;
        case UnaryFn::Abs:
          throw std::domain_error(
              "abs is not differentiable; it appears on a path that depends "
              "on the differentiation variable");
      }
      break;
    }
    case Kind::Binary: {
      NodePtr da = diff_node(n->a, v, memo);
      NodePtr db = diff_node(n->b, v, memo);
      const NodePtr& x = n->a;
      const NodePtr& y = n->b;
      switch (n->op) {
        case BinaryOp::Add:
          d = make_binary_node(BinaryOp::Add, da, db);
          break;
        case BinaryOp::Sub:
          d = make_binary_node(BinaryOp::Sub, da, db);
          break;
        case BinaryOp::Mul:
          d = make_binary_node(BinaryOp::Add,
                               make_binary_node(BinaryOp::Mul, da, y),
                               make_binary_node(BinaryOp::Mul, x, db));
          break;
        case BinaryOp::Div:
          // (da·y − x·db) / y²
          d = make_binary_node(
              BinaryOp::Div,
              make_binary_node(BinaryOp::Sub,
                               make_binary_node(BinaryOp::Mul, da, y),
                               make_binary_node(BinaryOp::Mul, x, db)),
              make_unary_node(UnaryFn::Square, y));
          break;
        case BinaryOp::Pow:
          if (is_const(db, 0.0)) {
            // constant exponent: c·x^(c−1)·dx
            d = make_binary_node(
                BinaryOp::Mul,
                make_binary_node(
                    BinaryOp::Mul, y,
                    make_binary_node(
                        BinaryOp::Pow, x,
                        make_binary_node(BinaryOp::Sub, y,
                                         make_constant_node(1.0)))),
                da);
          } else {
            // x^y · (db·log x + y·da/x)
            d = make_binary_node(
                BinaryOp::Mul, make_binary_node(BinaryOp::Pow, x, y),
                make_binary_node(
                    BinaryOp::Add,
                    make_binary_node(BinaryOp::Mul, db,
                                     make_unary_node(UnaryFn::Log, x)),
                    make_binary_node(BinaryOp::Mul, y,
                                     make_binary_node(BinaryOp::Div, da, x))));
          }
          break;
      }
      break;
    }
  }
  memo.emplace(n.get(), d);
  return d;
}

// Rebuilds the DAG bottom-up; `leaf` maps Var/Handle/Marker nodes to a
// replacement (or nullptr to keep). Unchanged subtrees are returned as-is so
// sharing survives the transformation.
NodePtr transform_node(const NodePtr& n,
                       const std::function<NodePtr(const NodePtr&)>& leaf,
                       std::unordered_map<const Node*, NodePtr>& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr out;
  switch (n->kind) {
    case Kind::Constant:
      out = n;
      break;
    case Kind::Var:
    case Kind::Handle:
    case Kind::Marker: {
      NodePtr r = leaf(n);
      out = r ? r : n;
      break;
    }
    case Kind::Unary: {
      NodePtr a = transform_node(n->a, leaf, memo);
      out = (a == n->a) ? n : make_unary_node(n->fn, std::move(a));
      break;
    }
    case Kind::Binary: {
      NodePtr a = transform_node(n->a, leaf, memo);
      NodePtr b = transform_node(n->b, leaf, memo);
      out = (a == n->a && b == n->b)
                ? n
                : make_binary_node(n->op, std::move(a), std::move(b));
      break;
    }
  }
  memo.emplace(n.get(), out);
  return out;
}

template <typename Visit>
void walk(const Node* n, std::unordered_set<const Node*>& seen, Visit&& visit) {
  if (!seen.insert(n).second) return;
  visit(n);
  if (n->a) walk(n->a.get(), seen, visit);
  if (n->b) walk(n->b.get(), seen, visit);
}

bool nodes_equal(const Node* x, const Node* y) {
  if (x == y) return true;
  if (x->hash != y->hash || x->kind != y->kind) return false;
  switch (x->kind) {
    case Kind::Constant:
      return x->value == y->value;
    case Kind::Var:
      return x->var == y->var;
    case Kind::Handle:
      return x->handle == y->handle;
    case Kind::Marker:
      return x->handle == y->handle && x->var == y->var;
    case Kind::Unary:
      return x->fn == y->fn && nodes_equal(x->a.get(), y->a.get());
    case Kind::Binary:
      return x->op == y->op && nodes_equal(x->a.get(), y->a.get()) &&
             nodes_equal(x->b.get(), y->b.get());
  }
  return false;
}

std::string node_to_string(const Node* n) {
  switch (n->kind) {
    case Kind::Constant:
      return format_double(n->value);
    case Kind::Var:
      return n->var.to_string();
    case Kind::Handle:
      return detail::str("E[", n->handle, "]");
    case Kind::Marker:
      return detail::str("dE[", n->handle, "]/d(", n->var.to_string(), ")");
    case Kind::Unary:
      if (n->fn == UnaryFn::Neg)
        return detail::str("-(", node_to_string(n->a.get()), ")");
      return detail::str(unary_fn_name(n->fn), "(",
                         node_to_string(n->a.get()), ")");
    case Kind::Binary: {
      const char* op = "?";
      switch (n->op) {
        case BinaryOp::Add: op = " + "; break;
        case BinaryOp::Sub: op = " - "; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
        case BinaryOp::Pow: op = "^"; break;
      }
      return detail::str("(", node_to_string(n->a.get()), op,
                         node_to_string(n->b.get()), ")");
    }
  }
  return "?";
}

}  // namespace

const char* unary_fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Neg: return "neg";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Tan: return "tan";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Square: return "square";
    case UnaryFn::Abs: return "abs";
  }
  return "?";
}

Variable Variable::parse(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos) return Variable(text);
  return Variable(text.substr(0, at), text.substr(at + 1));
}

Expr::Expr() : node_(make_constant_node(0.0)) {}
Expr::Expr(double value) : node_(make_constant_node(value)) {}

Expr::Expr(const Variable& v) {
  Node n;
  n.kind = Kind::Var;
  n.var = v;
  node_ = finish(std::move(n));
}

Expr Expr::constant(double v) { return Expr(v); }
Expr Expr::variable(const Variable& v) { return Expr(v); }

Expr Expr::expectation(std::uint64_t handle) {
  Node n;
  n.kind = Kind::Handle;
  n.handle = handle;
  return Expr(finish(std::move(n)));
}

Expr Expr::gradient_marker(std::uint64_t handle, const Variable& v) {
  Node n;
  n.kind = Kind::Marker;
  n.handle = handle;
  n.var = v;
  return Expr(finish(std::move(n)));
}

bool Expr::is_constant() const noexcept {
  return node_->kind == Kind::Constant;
}

double Expr::constant_value() const {
  if (!is_constant()) throw std::logic_error("expression is not a constant");
  return node_->value;
}

bool Expr::is_variable() const noexcept { return node_->kind == Kind::Var; }

const Variable& Expr::variable_ref() const {
  if (!is_variable()) throw std::logic_error("expression is not a variable");
  return node_->var;
}

bool Expr::is_zero() const noexcept { return is_const(node_, 0.0); }

double Expr::evaluate(const Assignment& vars) const {
  return evaluate(vars, HandleValues{});
}

double Expr::evaluate(const Assignment& vars, const HandleValues& evals) const {
  std::unordered_map<const Node*, double> memo;
  return eval_node(node_.get(), vars, evals, memo);
}

Expr Expr::differentiate(const Variable& v) const {
  std::unordered_map<const Node*, NodePtr> memo;
  return Expr(diff_node(node_, v, memo));
}

Expr Expr::map_variables(const std::map<Variable, Variable>& renaming) const {
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&renaming](const NodePtr& n) -> NodePtr {
    if (n->kind == Kind::Var || n->kind == Kind::Marker) {
      auto it = renaming.find(n->var);
      if (it == renaming.end()) return nullptr;
      Node m = *n;
      m.var = it->second;
      return finish(std::move(m));
    }
    return nullptr;
  };
  return Expr(transform_node(node_, leaf, memo));
}

Expr Expr::substitute(const std::map<Variable, Expr>& replacements) const {
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&replacements](const NodePtr& n) -> NodePtr {
    if (n->kind != Kind::Var) return nullptr;
    auto it = replacements.find(n->var);
    return it == replacements.end() ? nullptr : it->second.node_;
  };
  return Expr(transform_node(node_, leaf, memo));
}

Expr Expr::resolve_markers(
    const std::function<Expr(std::uint64_t, const Variable&)>& resolve) const {
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&resolve](const NodePtr& n) -> NodePtr {
    if (n->kind != Kind::Marker) return nullptr;
    return resolve(n->handle, n->var).node_;
  };
  return Expr(transform_node(node_, leaf, memo));
}

Expr Expr::map_handles(
    const std::function<std::uint64_t(std::uint64_t)>& remap) const {
  std::unordered_map<const Node*, NodePtr> memo;
  auto leaf = [&remap](const NodePtr& n) -> NodePtr {
    if (n->kind != Kind::Handle && n->kind != Kind::Marker) return nullptr;
    const std::uint64_t mapped = remap(n->handle);
    if (mapped == n->handle) return nullptr;
    Node m = *n;
    m.handle = mapped;
    return finish(std::move(m));
  };
  return Expr(transform_node(node_, leaf, memo));
}

void Expr::collect_variables(std::set<Variable>& out) const {
  std::unordered_set<const Node*> seen;
  walk(node_.get(), seen, [&out](const Node* n) {
    if (n->kind == Kind::Var) out.insert(n->var);
  });
}

std::set<Variable> Expr::variables() const {
  std::set<Variable> out;
  collect_variables(out);
  return out;
}

void Expr::collect_handles(std::set<std::uint64_t>& out) const {
  std::unordered_set<const Node*> seen;
  walk(node_.get(), seen, [&out](const Node* n) {
    if (n->kind == Kind::Handle) out.insert(n->handle);
  });
}

std::set<std::uint64_t> Expr::handles() const {
  std::set<std::uint64_t> out;
  collect_handles(out);
  return out;
}

bool Expr::has_markers() const noexcept {
  bool found = false;
  std::unordered_set<const Node*> seen;
  walk(node_.get(), seen, [&found](const Node* n) {
    if (n->kind == Kind::Marker) found = true;
  });
  return found;
}

bool Expr::depends_on(const Variable& v) const {
  bool found = false;
  std::unordered_set<const Node*> seen;
  walk(node_.get(), seen, [&found, &v](const Node* n) {
    if ((n->kind == Kind::Var || n->kind == Kind::Marker) && n->var == v)
      found = true;
  });
  return found;
}

std::size_t Expr::structural_hash() const noexcept { return node_->hash; }

bool Expr::same_structure(const Expr& other) const noexcept {
  return nodes_equal(node_.get(), other.node_.get());
}

std::string Expr::to_string() const { return node_to_string(node_.get()); }

Expr Expr::operator-() const {
  return Expr(make_unary_node(UnaryFn::Neg, node_));
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(make_binary_node(BinaryOp::Add, a.node_, b.node_));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(make_binary_node(BinaryOp::Sub, a.node_, b.node_));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(make_binary_node(BinaryOp::Mul, a.node_, b.node_));
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(make_binary_node(BinaryOp::Div, a.node_, b.node_));
}

Expr pow(const Expr& base, const Expr& exponent) {
  return Expr(make_binary_node(BinaryOp::Pow, base.node_, exponent.node_));
}

Expr apply_unary(UnaryFn fn, const Expr& a) {
  return Expr(make_unary_node(fn, a.node_));
}

Expr exp(const Expr& a) { return apply_unary(UnaryFn::Exp, a); }
Expr log(const Expr& a) { return apply_unary(UnaryFn::Log, a); }
Expr sin(const Expr& a) { return apply_unary(UnaryFn::Sin, a); }
Expr cos(const Expr& a) { return apply_unary(UnaryFn::Cos, a); }
Expr tan(const Expr& a) { return apply_unary(UnaryFn::Tan, a); }
Expr sqrt(const Expr& a) { return apply_unary(UnaryFn::Sqrt, a); }
Expr square(const Expr& a) { return apply_unary(UnaryFn::Square, a); }
Expr abs(const Expr& a) { return apply_unary(UnaryFn::Abs, a); }

}  // namespace varqo
