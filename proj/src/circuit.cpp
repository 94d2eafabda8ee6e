#include "varqo/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "varqo/common.hpp"

namespace varqo {

namespace {

constexpr double kHermitianTol = 1e-10;

bool is_rotation_tag(GateTag t) {
  return t == GateTag::Rx || t == GateTag::Ry || t == GateTag::Rz ||
         t == GateTag::Phase;
}

bool is_generator_tag(GateTag t) {
  return t == GateTag::ExpPauli || t == GateTag::GeneralizedRotation;
}

std::vector<unsigned> support_of(const QubitHamiltonian& h) {
  std::set<unsigned> qubits;
  for (const auto& term : h.terms())
    for (const auto& [q, axis] : term.factors()) {
      (void)axis;
      qubits.insert(q);
    }
  return {qubits.begin(), qubits.end()};
}

void check_index_list(const std::vector<unsigned>& v, const char* what) {
  std::unordered_set<unsigned> seen;
  for (unsigned q : v)
    if (!seen.insert(q).second)
      throw std::invalid_argument(
          detail::str("duplicate ", what, " qubit ", q));
}

std::string compact_pauli(const PauliString::FactorMap& factors) {
  if (factors.empty()) return "I";
  std::string out;
  for (const auto& [q, axis] : factors) {
    out += axis_char(axis);
    out += std::to_string(q);
  }
  return out;
}

PauliString::FactorMap parse_compact_pauli(const std::string& text) {
  PauliString::FactorMap factors;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument(
        detail::str("bad Pauli string '", text, "': ", msg));
  };
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    char c = text[i++];
    PauliAxis axis;
    switch (c) {
      case 'X': case 'x': axis = PauliAxis::X; break;
      case 'Y': case 'y': axis = PauliAxis::Y; break;
      case 'Z': case 'z': axis = PauliAxis::Z; break;
      case 'I': case 'i':
        // Identity needs no index, but tolerate one.
        while (i < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i])))
          ++i;
        continue;
      default:
        fail(detail::str("unexpected character '", c, "'"));
        return factors;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
      fail("axis letter must be followed by a qubit index");
    unsigned q = 0;
    while (i < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[i])))
      q = q * 10 + static_cast<unsigned>(text[i++] - '0');
    if (!factors.emplace(q, axis).second)
      fail(detail::str("qubit ", q, " appears twice"));
  }
  return factors;
}

}  // namespace

const char* gate_tag_name(GateTag tag) {
  switch (tag) {
    case GateTag::X: return "X";
    case GateTag::Y: return "Y";
    case GateTag::Z: return "Z";
    case GateTag::H: return "H";
    case GateTag::S: return "S";
    case GateTag::T: return "T";
    case GateTag::Rx: return "Rx";
    case GateTag::Ry: return "Ry";
    case GateTag::Rz: return "Rz";
    case GateTag::Phase: return "Phase";
    case GateTag::SWAP: return "SWAP";
    case GateTag::ExpPauli: return "ExpPauli";
    case GateTag::GeneralizedRotation: return "GeneralizedRotation";
    case GateTag::Power: return "Power";
  }
  return "?";
}

void Gate::validate() const {
  check_index_list(targets, "target");
  check_index_list(controls, "control");
  for (unsigned c : controls)
    if (std::find(targets.begin(), targets.end(), c) != targets.end())
      throw std::invalid_argument(
          detail::str("qubit ", c, " is both target and control"));

  const bool parametrized_tag = is_rotation_tag(tag) ||
                                is_generator_tag(tag) || tag == GateTag::Power;
  if (parametrized_tag && !parameter)
    throw std::invalid_argument(
        detail::str(gate_tag_name(tag), " gate requires a parameter"));
  if (!parametrized_tag && parameter)
    throw std::invalid_argument(
        detail::str(gate_tag_name(tag), " gate takes no parameter"));

  if (is_generator_tag(tag)) {
    if (!generator)
      throw std::invalid_argument(
          detail::str(gate_tag_name(tag), " gate requires a generator"));
    if (!generator->is_hermitian(kHermitianTol))
      throw std::invalid_argument("generator must be Hermitian");
    if (trotter_steps < 1)
      throw std::invalid_argument("trotter_steps must be at least 1");
    if (tag == GateTag::ExpPauli) {
      if (generator->size() != 1 ||
          std::abs(generator->terms()[0].coefficient() - cxd(1.0)) > 1e-9)
        throw std::invalid_argument(
            "ExpPauli generator must be a single unit-coefficient string");
    }
    if (targets != support_of(*generator))
      throw std::invalid_argument("generator gate targets must equal the "
                                  "generator support");
    for (unsigned c : controls)
      for (unsigned t : targets)
        if (c == t)
          throw std::invalid_argument(
              detail::str("qubit ", c, " is both generator support and "
                          "control"));
  } else {
    if (generator)
      throw std::invalid_argument(
          detail::str(gate_tag_name(tag), " gate takes no generator"));
    if (trotter_steps != 1)
      throw std::invalid_argument("trotter_steps only apply to generator "
                                  "gates");
    const std::size_t arity = tag == GateTag::SWAP ? 2 : 1;
    if (targets.size() != arity)
      throw std::invalid_argument(detail::str(gate_tag_name(tag), " gate needs ",
                                              arity, " target(s), got ",
                                              targets.size()));
  }

  if (tag == GateTag::Power && power_base != GateTag::X &&
      power_base != GateTag::Y && power_base != GateTag::Z)
    throw std::invalid_argument("Power base must be X, Y or Z");
}

unsigned Gate::n_qubits() const {
  unsigned n = 0;
  for (unsigned q : targets) n = std::max(n, q + 1);
  for (unsigned q : controls) n = std::max(n, q + 1);
  return n;
}

Gate Gate::adjoint() const {
  Gate g = *this;
  switch (tag) {
    case GateTag::X:
    case GateTag::Y:
    case GateTag::Z:
    case GateTag::H:
    case GateTag::SWAP:
      return g;
    case GateTag::S:
      g.tag = GateTag::Phase;
      g.parameter = Expr(-kPi / 2);
      return g;
    case GateTag::T:
      g.tag = GateTag::Phase;
      g.parameter = Expr(-kPi / 4);
      return g;
    case GateTag::Rx:
    case GateTag::Ry:
    case GateTag::Rz:
    case GateTag::Phase:
    case GateTag::Power:
    case GateTag::ExpPauli:
      g.parameter = -*parameter;
      return g;
    case GateTag::GeneralizedRotation: {
      // The stored semantics is the Trotter product itself, so the exact
      // adjoint reverses the factor order as well as the angle sign.
      g.parameter = -*parameter;
      std::vector<PauliString> terms(generator->terms().rbegin(),
                                     generator->terms().rend());
      g.generator = QubitHamiltonian(std::move(terms));
      return g;
    }
  }
  return g;
}

bool Gate::operator==(const Gate& o) const {
  if (tag != o.tag || targets != o.targets || controls != o.controls ||
      power_base != o.power_base || trotter_steps != o.trotter_steps)
    return false;
  if (parameter.has_value() != o.parameter.has_value()) return false;
  if (parameter && !parameter->same_structure(*o.parameter)) return false;
  if (generator.has_value() != o.generator.has_value()) return false;
  if (generator && !(generator->terms() == o.generator->terms())) return false;
  return true;
}

std::size_t Gate::structural_hash() const {
  std::size_t h = static_cast<std::size_t>(tag) * 0x9e3779b97f4a7c15ull;
  for (unsigned q : targets) detail::hash_combine(h, q + 1);
  detail::hash_combine(h, 0xffffu);
  for (unsigned q : controls) detail::hash_combine(h, q + 1);
  if (parameter) detail::hash_combine(h, parameter->structural_hash());
  if (generator)
    detail::hash_combine(h, std::hash<std::string>{}(generator->to_string()));
  detail::hash_combine(h, static_cast<std::size_t>(power_base));
  detail::hash_combine(h, trotter_steps);
  return h;
}

QCircuit::QCircuit(Gate g) {
  g.validate();
  gates_.push_back(std::move(g));
}

QCircuit::QCircuit(std::vector<Gate> gates) : gates_(std::move(gates)) {
  for (const Gate& g : gates_) g.validate();
}

unsigned QCircuit::n_qubits() const {
  unsigned n = 0;
  for (const Gate& g : gates_) n = std::max(n, g.n_qubits());
  return n;
}

QCircuit QCircuit::operator+(const QCircuit& o) const {
  QCircuit out = *this;
  out += o;
  return out;
}

QCircuit& QCircuit::operator+=(const QCircuit& o) {
  gates_.insert(gates_.end(), o.gates_.begin(), o.gates_.end());
  return *this;
}

QCircuit QCircuit::dagger() const {
  QCircuit out;
  out.gates_.reserve(gates_.size());
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it)
    out.gates_.push_back(it->adjoint());
  return out;
}

std::set<Variable> QCircuit::extract_variables() const {
  std::set<Variable> vars;
  for (const Gate& g : gates_)
    if (g.parameter) g.parameter->collect_variables(vars);
  return vars;
}

QCircuit QCircuit::map_variables(
    const std::map<Variable, Variable>& renaming) const {
  QCircuit out = *this;
  for (Gate& g : out.gates_)
    if (g.parameter) g.parameter = g.parameter->map_variables(renaming);
  return out;
}

QCircuit QCircuit::substitute_parameters(
    const std::map<Variable, Expr>& repl) const {
  QCircuit out = *this;
  for (Gate& g : out.gates_)
    if (g.parameter) g.parameter = g.parameter->substitute(repl);
  return out;
}

std::size_t QCircuit::structural_hash() const {
  std::size_t h = 0x51ab59f1c0ffee11ull;
  for (const Gate& g : gates_) detail::hash_combine(h, g.structural_hash());
  return h;
}

QCircuit trotterized(const QubitHamiltonian& generator, Expr angle,
                     unsigned steps) {
  if (steps < 1) throw std::invalid_argument("trotter steps must be >= 1");
  if (!generator.is_hermitian(kHermitianTol))
    throw std::invalid_argument("generator must be Hermitian");
  QCircuit out;
  for (unsigned n = 0; n < steps; ++n)
    for (const PauliString& term : generator.terms()) {
      double c = term.coefficient().real();
      if (c == 0.0) continue;
      out += gates::ExpPauli(
          PauliString(term.factors(), c / static_cast<double>(steps)), angle);
    }
  return out;
}

namespace gates {

namespace {

QCircuit plain(GateTag tag, std::vector<unsigned> targets,
               std::vector<unsigned> controls) {
  Gate g;
  g.tag = tag;
  g.targets = std::move(targets);
  g.controls = std::move(controls);
  return QCircuit(std::move(g));
}

QCircuit rotation(GateTag tag, Expr angle, unsigned target,
                  std::vector<unsigned> controls) {
  Gate g;
  g.tag = tag;
  g.targets = {target};
  g.controls = std::move(controls);
  g.parameter = std::move(angle);
  return QCircuit(std::move(g));
}

}  // namespace

QCircuit X(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::X, {target}, std::move(controls));
}
QCircuit Y(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::Y, {target}, std::move(controls));
}
QCircuit Z(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::Z, {target}, std::move(controls));
}
QCircuit H(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::H, {target}, std::move(controls));
}
QCircuit S(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::S, {target}, std::move(controls));
}
QCircuit T(unsigned target, std::vector<unsigned> controls) {
  return plain(GateTag::T, {target}, std::move(controls));
}
QCircuit Rx(Expr angle, unsigned target, std::vector<unsigned> controls) {
  return rotation(GateTag::Rx, std::move(angle), target, std::move(controls));
}
QCircuit Ry(Expr angle, unsigned target, std::vector<unsigned> controls) {
  return rotation(GateTag::Ry, std::move(angle), target, std::move(controls));
}
QCircuit Rz(Expr angle, unsigned target, std::vector<unsigned> controls) {
  return rotation(GateTag::Rz, std::move(angle), target, std::move(controls));
}
QCircuit Phase(Expr angle, unsigned target, std::vector<unsigned> controls) {
  return rotation(GateTag::Phase, std::move(angle), target,
                  std::move(controls));
}
QCircuit SWAP(unsigned a, unsigned b, std::vector<unsigned> controls) {
  return plain(GateTag::SWAP, {a, b}, std::move(controls));
}
QCircuit CNOT(unsigned control, unsigned target) {
  return X(target, {control});
}
QCircuit CX(unsigned control, unsigned target) { return X(target, {control}); }
QCircuit CZ(unsigned control, unsigned target) { return Z(target, {control}); }
QCircuit Toffoli(unsigned control_a, unsigned control_b, unsigned target) {
  return X(target, {control_a, control_b});
}

QCircuit Power(GateTag base, Expr exponent, unsigned target,
               std::vector<unsigned> controls) {
  Gate g;
  g.tag = GateTag::Power;
  g.power_base = base;
  g.targets = {target};
  g.controls = std::move(controls);
  g.parameter = std::move(exponent);
  return QCircuit(std::move(g));
}

QCircuit ExpPauli(const PauliString& string, Expr angle,
                  std::vector<unsigned> controls) {
  cxd c = string.coefficient();
  if (std::abs(c.imag()) > kHermitianTol)
    throw std::invalid_argument(
        "ExpPauli generator coefficient must be real");
  Gate g;
  g.tag = GateTag::ExpPauli;
  PauliString unit(string.factors(), 1.0);
  g.targets = support_of(QubitHamiltonian(unit));
  g.controls = std::move(controls);
  g.parameter = c.real() == 1.0 ? std::move(angle)
                                : std::move(angle) * Expr(c.real());
  g.generator = QubitHamiltonian(unit);
  return QCircuit(std::move(g));
}

QCircuit GeneralizedRotation(const QubitHamiltonian& generator, Expr angle,
                             unsigned steps, std::vector<unsigned> controls) {
  Gate g;
  g.tag = GateTag::GeneralizedRotation;
  g.generator = generator.simplified();
  g.targets = support_of(*g.generator);
  g.controls = std::move(controls);
  g.parameter = std::move(angle);
  g.trotter_steps = steps;
  return QCircuit(std::move(g));
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Text format

namespace {

struct ExprCursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument(
        detail::str("expression error at byte ", pos, ": ", msg));
  }
};

Expr parse_sum(ExprCursor& c);

Expr parse_atom(ExprCursor& c) {
  char ch = c.peek();
  if (ch == '(') {
    ++c.pos;
    Expr e = parse_sum(c);
    if (c.peek() != ')') c.fail("expected ')'");
    ++c.pos;
    return e;
  }
  if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
    const char* start = c.text.c_str() + c.pos;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) c.fail("expected a number");
    c.pos += static_cast<std::size_t>(end - start);
    return Expr(v);
  }
  if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
    std::size_t begin = c.pos;
    while (c.pos < c.text.size() &&
           (std::isalnum(static_cast<unsigned char>(c.text[c.pos])) ||
            c.text[c.pos] == '_'))
      ++c.pos;
    std::string name = c.text.substr(begin, c.pos - begin);
    if (c.pos < c.text.size() && c.text[c.pos] == '(') {
      ++c.pos;
      Expr arg = parse_sum(c);
      if (c.peek() != ')') c.fail("expected ')'");
      ++c.pos;
      if (name == "exp") return exp(arg);
      if (name == "log") return log(arg);
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "tan") return tan(arg);
      if (name == "sqrt") return sqrt(arg);
      if (name == "square") return square(arg);
      if (name == "abs") return abs(arg);
      c.fail(detail::str("unknown function '", name, "'"));
    }
    if (name == "pi") return Expr(kPi);
    if (c.pos < c.text.size() && c.text[c.pos] == '@') {
      ++c.pos;
      std::size_t lbegin = c.pos;
      while (c.pos < c.text.size() &&
             (std::isalnum(static_cast<unsigned char>(c.text[c.pos])) ||
              c.text[c.pos] == '_'))
        ++c.pos;
      if (c.pos == lbegin) c.fail("expected a label after '@'");
      return Expr(Variable(name, c.text.substr(lbegin, c.pos - lbegin)));
    }
    return Expr(Variable(name));
  }
  c.fail(detail::str("unexpected character '", ch, "'"));
}

Expr parse_unary(ExprCursor& c);

Expr parse_power(ExprCursor& c) {
  Expr base = parse_atom(c);
  if (c.peek() == '^') {
    ++c.pos;
    return pow(base, parse_unary(c));
  }
  return base;
}

Expr parse_unary(ExprCursor& c) {
  char ch = c.peek();
  if (ch == '-') {
    ++c.pos;
    return -parse_unary(c);
  }
  if (ch == '+') {
    ++c.pos;
    return parse_unary(c);
  }
  return parse_power(c);
}

Expr parse_product(ExprCursor& c) {
  Expr e = parse_unary(c);
  while (true) {
    char ch = c.peek();
    if (ch == '*') {
      ++c.pos;
      e = e * parse_unary(c);
    } else if (ch == '/') {
      ++c.pos;
      e = e / parse_unary(c);
    } else {
      return e;
    }
  }
}

Expr parse_sum(ExprCursor& c) {
  Expr e = parse_product(c);
  while (true) {
    char ch = c.peek();
    if (ch == '+') {
      ++c.pos;
      e = e + parse_product(c);
    } else if (ch == '-') {
      ++c.pos;
      e = e - parse_product(c);
    } else {
      return e;
    }
  }
}

// Splits "a, b, c" at commas that sit outside any parentheses.
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<unsigned> parse_qubit_list(const std::string& s,
                                       std::size_t line_no) {
  std::vector<unsigned> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    for (char ch : tok)
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw std::invalid_argument(detail::str(
            "circuit text line ", line_no, ": bad qubit index '", tok, "'"));
    out.push_back(static_cast<unsigned>(std::stoul(tok)));
  }
  return out;
}

}  // namespace

Expr parse_expression(const std::string& text) {
  ExprCursor c{text};
  Expr e = parse_sum(c);
  if (!c.eof())
    c.fail(detail::str("unexpected trailing '", c.peek(), "'"));
  return e;
}

std::string QCircuit::to_text() const {
  std::ostringstream out;
  for (const Gate& g : gates_) {
    out << gate_tag_name(g.tag);
    switch (g.tag) {
      case GateTag::Rx:
      case GateTag::Ry:
      case GateTag::Rz:
      case GateTag::Phase:
        out << '(' << g.parameter->to_string() << ')';
        break;
      case GateTag::Power:
        out << '(' << gate_tag_name(g.power_base) << ", "
            << g.parameter->to_string() << ')';
        break;
      case GateTag::ExpPauli:
        out << '(' << g.parameter->to_string() << ", "
            << compact_pauli(g.generator->terms()[0].factors()) << ')';
        break;
      case GateTag::GeneralizedRotation:
        out << '(' << g.parameter->to_string() << ", "
            << g.generator->to_string() << ')';
        break;
      default:
        break;
    }
    if (!is_generator_tag(g.tag))
      for (unsigned q : g.targets) out << ' ' << q;
    if (!g.controls.empty()) {
      out << " |";
      for (unsigned q : g.controls) out << ' ' << q;
    }
    if (is_generator_tag(g.tag) && g.trotter_steps != 1)
      out << " ; steps=" << g.trotter_steps;
    out << '\n';
  }
  return out.str();
}

QCircuit QCircuit::from_text(const std::string& text) {
  QCircuit out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    auto fail = [&](const std::string& msg) -> void {
      throw std::invalid_argument(
          detail::str("circuit text line ", line_no, ": ", msg));
    };

    // Optional "; key=value" tail.
    unsigned steps = 1;
    if (auto semi = line.find(';'); semi != std::string::npos) {
      std::string opts = trim(line.substr(semi + 1));
      line = trim(line.substr(0, semi));
      for (const std::string& raw : split_top_level(opts)) {
        std::string opt = trim(raw);
        auto eq = opt.find('=');
        if (eq == std::string::npos)
          fail(detail::str("bad option '", opt, "', expected key=value"));
        std::string key = trim(opt.substr(0, eq));
        std::string value = trim(opt.substr(eq + 1));
        if (key == "steps") {
          try {
            steps = static_cast<unsigned>(std::stoul(value));
          } catch (const std::exception&) {
            fail(detail::str("bad steps value '", value, "'"));
          }
          if (steps < 1) fail("steps must be at least 1");
        } else {
          fail(detail::str("unknown option '", key, "'"));
        }
      }
    }

    // Optional "| controls" tail.
    std::vector<unsigned> controls;
    if (auto bar = line.find('|'); bar != std::string::npos) {
      controls = parse_qubit_list(line.substr(bar + 1), line_no);
      if (controls.empty()) fail("expected control qubits after '|'");
      line = trim(line.substr(0, bar));
    }

    std::size_t i = 0;
    while (i < line.size() &&
           std::isalpha(static_cast<unsigned char>(line[i])))
      ++i;
    std::string name = line.substr(0, i);
    if (name.empty()) fail("expected a gate name");

    std::vector<std::string> args;
    bool has_args = false;
    if (i < line.size() && line[i] == '(') {
      has_args = true;
      int depth = 1;
      std::size_t begin = ++i;
      while (i < line.size() && depth > 0) {
        if (line[i] == '(') ++depth;
        if (line[i] == ')') --depth;
        ++i;
      }
      if (depth != 0) fail("unbalanced parentheses in gate arguments");
      for (const std::string& a : split_top_level(
               line.substr(begin, i - 1 - begin)))
        args.push_back(trim(a));
    }
    std::vector<unsigned> targets = parse_qubit_list(line.substr(i), line_no);

    auto want_args = [&](std::size_t n) {
      if (!has_args || args.size() != n)
        fail(detail::str(name, " expects ", n, " argument(s)"));
    };
    auto want_no_args = [&]() {
      if (has_args) fail(detail::str(name, " takes no arguments"));
    };
    auto want_targets = [&](std::size_t n) {
      if (targets.size() != n)
        fail(detail::str(name, " expects ", n, " target(s), got ",
                         targets.size()));
    };
    auto want_controls = [&](std::size_t n) {
      if (controls.size() != n)
        fail(detail::str(name, " expects ", n, " control(s) after '|'"));
    };
    auto expr_arg = [&](const std::string& a) -> Expr {
      try {
        return parse_expression(a);
      } catch (const std::invalid_argument& e) {
        fail(detail::str("in '", a, "': ", e.what()));
      }
      return Expr(0.0);  // unreachable
    };

    try {
      if (name == "X" || name == "Y" || name == "Z" || name == "H" ||
          name == "S" || name == "T") {
        want_no_args();
        want_targets(1);
        GateTag tag = name == "X"   ? GateTag::X
                      : name == "Y" ? GateTag::Y
                      : name == "Z" ? GateTag::Z
                      : name == "H" ? GateTag::H
                      : name == "S" ? GateTag::S
                                    : GateTag::T;
        out += gates::plain(tag, {targets[0]}, std::move(controls));
      } else if (name == "Rx" || name == "Ry" || name == "Rz" ||
                 name == "Phase") {
        want_args(1);
        want_targets(1);
        GateTag tag = name == "Rx"   ? GateTag::Rx
                      : name == "Ry" ? GateTag::Ry
                      : name == "Rz" ? GateTag::Rz
                                     : GateTag::Phase;
        out += gates::rotation(tag, expr_arg(args[0]), targets[0],
                               std::move(controls));
      } else if (name == "SWAP") {
        want_no_args();
        want_targets(2);
        out += gates::SWAP(targets[0], targets[1], std::move(controls));
      } else if (name == "CNOT" || name == "CX" || name == "CZ") {
        want_no_args();
        want_targets(1);
        want_controls(1);
        out += name == "CZ" ? gates::CZ(controls[0], targets[0])
                            : gates::CNOT(controls[0], targets[0]);
      } else if (name == "Toffoli" || name == "CCX") {
        want_no_args();
        want_targets(1);
        want_controls(2);
        out += gates::Toffoli(controls[0], controls[1], targets[0]);
      } else if (name == "Power") {
        want_args(2);
        want_targets(1);
        std::string base = trim(args[0]);
        GateTag base_tag;
        if (base == "X") base_tag = GateTag::X;
        else if (base == "Y") base_tag = GateTag::Y;
        else if (base == "Z") base_tag = GateTag::Z;
        else { fail(detail::str("bad Power base '", base, "'")); return out; }
        out += gates::Power(base_tag, expr_arg(args[1]), targets[0],
                            std::move(controls));
      } else if (name == "ExpPauli") {
        want_args(2);
        want_targets(0);
        Gate g;
        g.tag = GateTag::ExpPauli;
        g.parameter = expr_arg(args[0]);
        PauliString unit(parse_compact_pauli(args[1]), 1.0);
        g.generator = QubitHamiltonian(unit);
        g.targets = support_of(*g.generator);
        g.controls = std::move(controls);
        g.trotter_steps = steps;
        steps = 1;
        out += QCircuit(std::move(g));
      } else if (name == "GeneralizedRotation" || name == "GenRot") {
        want_args(2);
        want_targets(0);
        out += gates::GeneralizedRotation(QubitHamiltonian::parse(args[1]),
                                          expr_arg(args[0]), steps,
                                          std::move(controls));
        steps = 1;
      } else {
        fail(detail::str("unknown gate '", name, "'"));
      }
    } catch (const std::invalid_argument& e) {
      std::string what = e.what();
      if (what.rfind("circuit text line", 0) == 0) throw;
      fail(what);
    }
    if (steps != 1) fail("steps only apply to ExpPauli/GeneralizedRotation");
  }
  return out;
}

}  // namespace varqo
