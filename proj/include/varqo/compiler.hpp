#pragma once

#include "varqo/circuit.hpp"

namespace varqo {

// Pass toggles for compile_circuit. Passes always run in a fixed order:
// generalized_rotation, multi_control, exp_pauli, power, controlled_rotation.
// Every pass preserves the circuit's dense unitary and is idempotent.
struct CompilerConfig {
  bool generalized_rotation = false;
  bool multi_control = false;
  bool exp_pauli = false;
  bool power = false;
  bool controlled_rotation = false;

  static CompilerConfig all();

  // The configuration used before shift-rule differentiation: controls stay
  // native (the simulator handles them), but every parametrized gate must
  // come out uncontrolled with a single-Pauli generator.
  static CompilerConfig gradient();
};

QCircuit compile_circuit(const QCircuit& circuit, const CompilerConfig& config);

// GeneralizedRotation gates become their Trotter ExpPauli expansion; controls
// carry over to each factor.
QCircuit compile_generalized_rotation(const QCircuit& circuit);

// Gates with two or more controls are lowered to single-control gates via the
// ancilla-free square-root recursion (controlled-V, CX, controlled-V dagger,
// CX, controlled-V). Gate count grows exponentially in the control count.
QCircuit compile_multi_control(const QCircuit& circuit);

// Non-identity ExpPauli gates become basis changes (H for X, Rx(pi/2) for Y),
// a CNOT parity ladder onto the last support qubit, an Rz (inheriting the
// gate's controls) and the inverse ladder/basis.
QCircuit compile_exp_pauli(const QCircuit& circuit);

// Power gates A^t become e^{i pi t/2} R_A(pi t): a global-phase rotation plus
// a plain rotation; controlled powers put Phase(pi t/2) on a control instead
// of the global phase.
QCircuit compile_power(const QCircuit& circuit);

// Controlled parametrized gates (Rx, Ry, Rz, Phase, ExpPauli) are rewritten
// so every parameter occurrence sits on an uncontrolled gate, using CNOT (or
// controlled-Pauli) entanglers and half-angle pairs.
QCircuit compile_controlled_rotation(const QCircuit& circuit);

// True when the gate either carries no parameter or is an uncontrolled
// rotation with a single-Pauli generator, i.e. the +-pi/2 shift rule applies
// to its parameter directly. compile_circuit with the gradient() config makes
// every gate satisfy this.
bool shift_rule_ready(const Gate& gate);

}  // namespace varqo
