#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "varqo/expr.hpp"
#include "varqo/pauli.hpp"

namespace varqo {

enum class GateTag {
  X, Y, Z, H, S, T,
  Rx, Ry, Rz, Phase,
  SWAP,
  ExpPauli,             // e^{-i(theta/2) P} for one unit-coefficient string
  GeneralizedRotation,  // Trotter product over a Hermitian generator
  Power,                // A^t for A in {X, Y, Z}, principal branch
};

const char* gate_tag_name(GateTag tag);

// One circuit element. Rotation conventions:
//   Rz(t) = diag(e^{-it/2}, e^{+it/2}),  Ry(t) = [[cos t/2, -sin t/2],
//                                                 [sin t/2,  cos t/2]],
//   Phase(p) = diag(1, e^{ip}),  ExpPauli(P,t) = cos(t/2) I - i sin(t/2) P,
//   Power base A with exponent t: A^t = e^{i pi t/2} R_A(pi t).
// GeneralizedRotation(G, t, N) means the product
//   prod_{n=1..N} prod_k e^{-i (t/2)(c_k/N) sigma_k}
// over the generator's stored term order, not the exact exponential.
struct Gate {
  GateTag tag;
  std::vector<unsigned> targets;
  std::vector<unsigned> controls;
  std::optional<Expr> parameter;
  std::optional<QubitHamiltonian> generator;  // ExpPauli, GeneralizedRotation
  GateTag power_base = GateTag::X;            // Power only
  unsigned trotter_steps = 1;                 // generator gates only

  bool is_parametrized() const { return parameter.has_value(); }
  unsigned n_qubits() const;
  Gate adjoint() const;
  bool operator==(const Gate& o) const;
  std::size_t structural_hash() const;

  // Construction goes through validate(): index clash and arity checks,
  // generator Hermiticity (imaginary coefficients below 1e-10).
  void validate() const;
};

// Ordered gate list. Concatenation is circuit-order: in (a + b), a acts
// first, so the combined unitary is U_b * U_a.
class QCircuit {
 public:
  QCircuit() = default;
  explicit QCircuit(Gate g);
  explicit QCircuit(std::vector<Gate> gates);

  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  unsigned n_qubits() const;

  QCircuit operator+(const QCircuit& o) const;
  QCircuit& operator+=(const QCircuit& o);

  // Reversed order, each gate adjointed; parameters negate symbolically and
  // S/T become Phase gates.
  QCircuit dagger() const;

  std::set<Variable> extract_variables() const;
  QCircuit map_variables(const std::map<Variable, Variable>& renaming) const;
  QCircuit substitute_parameters(const std::map<Variable, Expr>& repl) const;

  bool operator==(const QCircuit& o) const { return gates_ == o.gates_; }
  std::size_t structural_hash() const;

  // One gate per line: NAME(args?) targets [| controls] [; steps=N].
  // Generator-carrying gates list no targets (the generator defines them).
  std::string to_text() const;
  static QCircuit from_text(const std::string& text);

 private:
  std::vector<Gate> gates_;
};

// Parameter sub-grammar of the circuit text format: numbers, variables
// ("name" or "name@label"), pi, + - * / ^, parentheses and the unary
// function set (exp, log, sin, cos, tan, sqrt, square, abs).
Expr parse_expression(const std::string& text);

// Formal Trotter expansion of e^{-i(angle/2) G} into ExpPauli factors:
// steps sweeps over the generator's terms in stored order, each term k
// contributing e^{-i (angle/2)(c_k/N) sigma_k}. Exact when all terms
// commute; otherwise the error falls off as 1/steps.
QCircuit trotterized(const QubitHamiltonian& generator, Expr angle,
                     unsigned steps = 1);

namespace gates {

QCircuit X(unsigned target, std::vector<unsigned> controls = {});
QCircuit Y(unsigned target, std::vector<unsigned> controls = {});
QCircuit Z(unsigned target, std::vector<unsigned> controls = {});
QCircuit H(unsigned target, std::vector<unsigned> controls = {});
QCircuit S(unsigned target, std::vector<unsigned> controls = {});
QCircuit T(unsigned target, std::vector<unsigned> controls = {});
QCircuit Rx(Expr angle, unsigned target, std::vector<unsigned> controls = {});
QCircuit Ry(Expr angle, unsigned target, std::vector<unsigned> controls = {});
QCircuit Rz(Expr angle, unsigned target, std::vector<unsigned> controls = {});
QCircuit Phase(Expr angle, unsigned target, std::vector<unsigned> controls = {});
QCircuit SWAP(unsigned a, unsigned b, std::vector<unsigned> controls = {});
QCircuit CNOT(unsigned control, unsigned target);
QCircuit CX(unsigned control, unsigned target);
QCircuit CZ(unsigned control, unsigned target);
QCircuit Toffoli(unsigned control_a, unsigned control_b, unsigned target);
QCircuit Power(GateTag base, Expr exponent, unsigned target,
               std::vector<unsigned> controls = {});

// The string's real coefficient is folded into the angle so the stored
// generator has unit coefficient; complex coefficients are rejected.
QCircuit ExpPauli(const PauliString& string, Expr angle,
                  std::vector<unsigned> controls = {});

QCircuit GeneralizedRotation(const QubitHamiltonian& generator, Expr angle,
                             unsigned steps = 1,
                             std::vector<unsigned> controls = {});

}  // namespace gates

}  // namespace varqo
