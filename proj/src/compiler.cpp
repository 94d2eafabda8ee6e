#include "varqo/compiler.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

#include "varqo/common.hpp"

namespace varqo {

namespace {

Expr half(const Expr& e) { return e * Expr::constant(0.5); }
Expr neg_half(const Expr& e) { return e * Expr::constant(-0.5); }

QCircuit single(Gate g) { return QCircuit{std::move(g)}; }

Gate with_controls(Gate g, std::vector<unsigned> controls) {
  g.controls = std::move(controls);
  g.validate();
  return g;
}

// ---- generalized rotation ----

QCircuit expand_generalized(const Gate& g) {
  QCircuit plain = trotterized(*g.generator, *g.parameter, g.trotter_steps);
  if (g.controls.empty()) return plain;
  // C(U_1 ... U_m) = C(U_1) ... C(U_m): attach the control set to each factor.
  QCircuit out;
  for (const Gate& e : plain.gates()) out += single(with_controls(e, g.controls));
  return out;
}

// ---- multi-control lowering ----

// Square root of an uncontrolled gate as pre * mid * post with post == pre
// adjoint, so controlling only mid controls the whole product.
struct SqrtParts {
  QCircuit pre;
  Gate mid;
  QCircuit post;
};

SqrtParts sqrt_parts(const Gate& core) {
  SqrtParts out;
  const unsigned t = core.targets.empty() ? 0u : core.targets[0];
  switch (core.tag) {
    case GateTag::X:
    case GateTag::Y:
    case GateTag::Z:
      out.mid = gates::Power(core.tag, Expr::constant(0.5), t).gates()[0];
      return out;
    case GateTag::H:
      // H = Ry(pi/4) Z Ry(-pi/4) as matrices, so sqrt(H) conjugates sqrt(Z).
      out.pre = gates::Ry(Expr::constant(-kPi / 4), t);
      out.mid = gates::Power(GateTag::Z, Expr::constant(0.5), t).gates()[0];
      out.post = gates::Ry(Expr::constant(kPi / 4), t);
      return out;
    case GateTag::S:
      out.mid = gates::Phase(Expr::constant(kPi / 4), t).gates()[0];
      return out;
    case GateTag::T:
      out.mid = gates::Phase(Expr::constant(kPi / 8), t).gates()[0];
      return out;
    case GateTag::Rx:
    case GateTag::Ry:
    case GateTag::Rz:
    case GateTag::Phase:
    case GateTag::ExpPauli: {
      Gate mid = core;
      mid.parameter = half(*core.parameter);
      mid.validate();
      out.mid = std::move(mid);
      return out;
    }
    case GateTag::Power:
      out.mid = gates::Power(core.power_base, half(*core.parameter), t).gates()[0];
      return out;
    default:
      throw std::logic_error("no square root mapping for gate");
  }
}

QCircuit expand_multi_step(const Gate& g) {
  if (g.tag == GateTag::GeneralizedRotation) return expand_generalized(g);
  if (g.tag == GateTag::SWAP) {
    // C^k SWAP(a, b) = CX(b->a) C^k X(b | controls, a) CX(b->a).
    const unsigned a = g.targets[0], b = g.targets[1];
    std::vector<unsigned> mid_controls = g.controls;
    mid_controls.push_back(a);
    return gates::X(a, {b}) + gates::X(b, std::move(mid_controls)) +
           gates::X(a, {b});
  }
  const unsigned pivot = g.controls.back();
  const std::vector<unsigned> rest(g.controls.begin(), g.controls.end() - 1);
  Gate core = g;
  core.controls.clear();
  const SqrtParts v = sqrt_parts(core);
  QCircuit out;
  out += v.pre;
  out += single(with_controls(v.mid, {pivot}));
  out += v.post;
  out += gates::X(pivot, rest);
  out += v.pre;
  out += single(with_controls(v.mid.adjoint(), {pivot}));
  out += v.post;
  out += gates::X(pivot, rest);
  out += v.pre;
  out += single(with_controls(v.mid, rest));
  out += v.post;
  return out;
}

// ---- exp-pauli lowering ----

QCircuit expand_exp_pauli(const Gate& g) {
  const PauliString& p = g.generator->terms().front();
  if (p.factors().empty()) {
    // Pure phase e^{-i theta/2}. Uncontrolled it is global: keep the gate.
    // Controlled it is Phase(-theta/2) on the last control.
    if (g.controls.empty()) return single(g);
    const std::vector<unsigned> rest(g.controls.begin(), g.controls.end() - 1);
    return gates::Phase(neg_half(*g.parameter), g.controls.back(), rest);
  }
  QCircuit basis, ladder;
  std::vector<unsigned> support;
  for (const auto& [q, axis] : p.factors()) {
    support.push_back(q);
    if (axis == PauliAxis::X) basis += gates::H(q);
    if (axis == PauliAxis::Y) basis += gates::Rx(Expr::constant(kPi / 2), q);
  }
  for (std::size_t i = 0; i + 1 < support.size(); ++i)
    ladder += gates::CX(support[i], support[i + 1]);
  return basis + ladder +
         gates::Rz(*g.parameter, support.back(), g.controls) +
         ladder.dagger() + basis.dagger();
}

// ---- power lowering ----

QCircuit expand_power(const Gate& g) {
  const Expr& t = *g.parameter;
  const Expr rot_angle = Expr::constant(kPi) * t;
  QCircuit out;
  if (g.controls.empty()) {
    // Global phase e^{+i pi t/2} as an identity-generator rotation.
    out += gates::ExpPauli(PauliString(PauliString::FactorMap{}, 1.0),
                           Expr::constant(-kPi) * t);
  } else {
    const std::vector<unsigned> rest(g.controls.begin(), g.controls.end() - 1);
    out += gates::Phase(Expr::constant(kPi * 0.5) * t, g.controls.back(), rest);
  }
  switch (g.power_base) {
    case GateTag::X: out += gates::Rx(rot_angle, g.targets[0], g.controls); break;
    case GateTag::Y: out += gates::Ry(rot_angle, g.targets[0], g.controls); break;
    default:         out += gates::Rz(rot_angle, g.targets[0], g.controls); break;
  }
  return out;
}

// ---- controlled-rotation lowering ----

QCircuit rz_sandwich(const Expr& theta, unsigned t,
                     const std::vector<unsigned>& controls) {
  return gates::Rz(half(theta), t) + gates::X(t, controls) +
         gates::Rz(neg_half(theta), t) + gates::X(t, controls);
}

// C^k Phase(phi, t) = [Phase(phi/2)_t, C^k X, Phase(-phi/2)_t, C^k X] times
// the same construction recursively for the residual phase e^{i phi/2} on the
// all-controls-on subspace.
QCircuit lower_controlled_phase(const Expr& phi, unsigned t,
                                std::vector<unsigned> controls) {
  if (controls.empty()) return gates::Phase(phi, t);
  QCircuit out = gates::Phase(half(phi), t) + gates::X(t, controls) +
                 gates::Phase(neg_half(phi), t) + gates::X(t, controls);
  const unsigned pivot = controls.back();
  controls.pop_back();
  out += lower_controlled_phase(half(phi), pivot, std::move(controls));
  return out;
}

QCircuit lower_controlled_rotation(const Gate& g) {
  if (g.controls.empty()) return single(g);
  const Expr& theta = *g.parameter;
  switch (g.tag) {
    case GateTag::Rz:
      return rz_sandwich(theta, g.targets[0], g.controls);
    case GateTag::Rx:
      return gates::H(g.targets[0]) +
             rz_sandwich(theta, g.targets[0], g.controls) +
             gates::H(g.targets[0]);
    case GateTag::Ry:
      return gates::Rx(Expr::constant(kPi / 2), g.targets[0]) +
             rz_sandwich(theta, g.targets[0], g.controls) +
             gates::Rx(Expr::constant(-kPi / 2), g.targets[0]);
    case GateTag::Phase:
      return lower_controlled_phase(theta, g.targets[0], g.controls);
    case GateTag::ExpPauli: {
      const PauliString& p = g.generator->terms().front();
      if (p.factors().empty()) {
        std::vector<unsigned> rest(g.controls.begin(), g.controls.end() - 1);
        return lower_controlled_phase(neg_half(theta), g.controls.back(),
                                      std::move(rest));
      }
      // Sandwich with a controlled single-qubit Pauli F that anticommutes
      // with the generator: F e^{+i theta/4 P} F = e^{-i theta/4 P}.
      const auto& [q, axis] = *p.factors().begin();
      const QCircuit f = axis == PauliAxis::Z ? gates::X(q, g.controls)
                                              : gates::Z(q, g.controls);
      const PauliString unit(p.factors(), 1.0);
      return gates::ExpPauli(unit, half(theta)) + f +
             gates::ExpPauli(unit, neg_half(theta)) + f;
    }
    default:
      return single(g);
  }
}

template <typename Fn>
QCircuit map_gates(const QCircuit& c, Fn&& fn) {
  QCircuit out;
  for (const Gate& g : c.gates()) out += fn(g);
  return out;
}

}  // namespace

CompilerConfig CompilerConfig::all() {
  CompilerConfig c;
  c.generalized_rotation = true;
  c.multi_control = true;
  c.exp_pauli = true;
  c.power = true;
  c.controlled_rotation = true;
  return c;
}

CompilerConfig CompilerConfig::gradient() {
  CompilerConfig c;
  c.generalized_rotation = true;
  c.power = true;
  c.controlled_rotation = true;
  return c;
}

QCircuit compile_generalized_rotation(const QCircuit& circuit) {
  return map_gates(circuit, [](const Gate& g) {
    return g.tag == GateTag::GeneralizedRotation ? expand_generalized(g)
                                                 : single(g);
  });
}

QCircuit compile_multi_control(const QCircuit& circuit) {
  QCircuit cur = circuit;
  for (bool changed = true; changed;) {
    changed = false;
    cur = map_gates(cur, [&changed](const Gate& g) {
      if (g.controls.size() < 2) return single(g);
      changed = true;
      return expand_multi_step(g);
    });
  }
  return cur;
}

QCircuit compile_exp_pauli(const QCircuit& circuit) {
  return map_gates(circuit, [](const Gate& g) {
    return g.tag == GateTag::ExpPauli ? expand_exp_pauli(g) : single(g);
  });
}

QCircuit compile_power(const QCircuit& circuit) {
  return map_gates(circuit, [](const Gate& g) {
    return g.tag == GateTag::Power ? expand_power(g) : single(g);
  });
}

QCircuit compile_controlled_rotation(const QCircuit& circuit) {
  return map_gates(circuit, [](const Gate& g) {
    return g.is_parametrized() ? lower_controlled_rotation(g) : single(g);
  });
}

QCircuit compile_circuit(const QCircuit& circuit, const CompilerConfig& config) {
  QCircuit out = circuit;
  if (config.generalized_rotation) out = compile_generalized_rotation(out);
  if (config.multi_control) out = compile_multi_control(out);
  if (config.exp_pauli) out = compile_exp_pauli(out);
  if (config.power) out = compile_power(out);
  if (config.controlled_rotation) out = compile_controlled_rotation(out);
  return out;
}

bool shift_rule_ready(const Gate& gate) {
  if (!gate.parameter) return true;
  if (!gate.controls.empty()) return false;
  switch (gate.tag) {
    case GateTag::Rx:
    case GateTag::Ry:
    case GateTag::Rz:
    case GateTag::Phase:
    case GateTag::ExpPauli:
      return true;
    default:
      return false;
  }
}

}  // namespace varqo
