#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "varqo/circuit.hpp"
#include "varqo/expr.hpp"
#include "varqo/pauli.hpp"
#include "varqo/simulator.hpp"

namespace varqo {

// One abstract <psi(theta)| H |psi(theta)> with its preparation circuit.
// Structurally identical values are interned into a process-wide table, so a
// given (circuit, Hamiltonian, flag) triple always maps to the same handle
// and is evaluated once per objective call.
struct ExpectationValue {
  QCircuit circuit;
  QubitHamiltonian hamiltonian;
  bool optimize_measurements = false;
};

// A real-valued function of variables and expectation-value handles.
// Arithmetic composes the expression; the handles keep pointing at the
// interned expectation values, so shared terms are never evaluated twice.
class Objective {
 public:
  Objective() : expr_(0.0) {}
  Objective(double value) : expr_(value) {}       // NOLINT: implicit by design
  Objective(const Variable& v) : expr_(v) {}      // NOLINT: implicit by design
  explicit Objective(Expr expr);

  const Expr& expr() const { return expr_; }
  std::set<std::uint64_t> handles() const { return expr_.handles(); }
  std::map<std::uint64_t, ExpectationValue> expectation_values() const;

  // Union of expression variables and all referenced circuit parameters.
  std::set<Variable> extract_variables() const;

  Objective operator-() const { return Objective(-expr_); }
  Objective apply(UnaryFn fn) const { return Objective(apply_unary(fn, expr_)); }

  friend Objective operator+(const Objective& a, const Objective& b);
  friend Objective operator-(const Objective& a, const Objective& b);
  friend Objective operator*(const Objective& a, const Objective& b);
  friend Objective operator/(const Objective& a, const Objective& b);
  friend Objective pow(const Objective& base, const Objective& exponent);

 private:
  Expr expr_;
};

// Single-handle objective <H>_U. Throws when H is not Hermitian within 1e-10.
Objective make_expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                           bool optimize_measurements = false);

// Look up an interned expectation value by handle.
const ExpectationValue& expectation_value(std::uint64_t handle);

// Replaces variables throughout the objective: inside the expression and
// inside every referenced circuit's gate angles. Circuits that change are
// re-registered, so the result is independent of the original.
Objective substitute_variables(const Objective& o,
                               const std::map<Variable, Expr>& replacements);

// Exact derivative dO/dv as a new Objective. Shift-rule handles the circuit
// side: each expectation's circuit is lowered with the gradient compiler
// config, then every occurrence of v in a gate angle theta_i contributes
// d(theta_i)/dv * 1/2 * (E[theta_i + pi/2] - E[theta_i - pi/2]). The result
// is differentiable again. A variable that occurs nowhere yields the zero
// Objective.
Objective grad(const Objective& o, const Variable& v);

struct EvalStats {
  std::size_t expectation_evaluations = 0;
};

// An Objective frozen together with its execution config. Calls are pure
// given (assignment, seed): the exact path evaluates expectations through
// the statevector, the sampled path estimates them from counts under
// per-expectation derived seeds.
class CompiledObjective {
 public:
  double operator()(const Assignment& vars = {}) const;
  // Same evaluation with the shot count overridden for this call.
  double operator()(const Assignment& vars, std::uint64_t samples) const;

  const Objective& objective() const { return objective_; }
  // Bookkeeping from the most recent call.
  const EvalStats& last_stats() const { return stats_; }

 private:
  friend CompiledObjective compile(const Objective&,
                                   std::optional<std::uint64_t>,
                                   std::optional<NoiseModel>, std::uint64_t,
                                   const SimulatorOptions&);
  double run(const Assignment& vars,
             std::optional<std::uint64_t> samples) const;

  Objective objective_;
  std::map<std::uint64_t, QCircuit> compiled_circuits_;
  std::optional<std::uint64_t> samples_;
  std::optional<NoiseModel> noise_;
  std::uint64_t seed_ = 0;
  SimulatorOptions options_;
  mutable EvalStats stats_;
};

// Freeze an objective for evaluation. Without `samples` expectations are
// exact and `noise` is rejected; with `samples` they are estimated from that
// many shots per measurement group.
CompiledObjective compile(const Objective& o,
                          std::optional<std::uint64_t> samples = std::nullopt,
                          std::optional<NoiseModel> noise = std::nullopt,
                          std::uint64_t seed = 0,
                          const SimulatorOptions& options = {});

}  // namespace varqo
