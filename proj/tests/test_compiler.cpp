#include "varqo/compiler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "varqo/circuit.hpp"
#include "varqo/simulator.hpp"

using namespace varqo;

namespace {

double unitary_distance(const QCircuit& a, const QCircuit& b, unsigned n,
                        const Assignment& vars = {}) {
  const Eigen::MatrixXcd ua = testsupport::circuit_unitary(a, n, vars);
  const Eigen::MatrixXcd ub = testsupport::circuit_unitary(b, n, vars);
  return (ua - ub).cwiseAbs().maxCoeff();
}

std::size_t max_controls(const QCircuit& c) {
  std::size_t m = 0;
  for (const Gate& g : c.gates()) m = std::max(m, g.controls.size());
  return m;
}

bool controlled_gates_unparametrized(const QCircuit& c) {
  return std::all_of(c.gates().begin(), c.gates().end(), [](const Gate& g) {
    return g.controls.empty() || !g.is_parametrized();
  });
}

// Circuits whose gates carry two or three controls, the regime the
// multi-control pass exists for.
QCircuit random_multi_control_circuit(std::mt19937& rng, unsigned n_qubits,
                                      unsigned n_gates) {
  std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
  std::uniform_real_distribution<double> expo(-1.5, 1.5);
  std::vector<unsigned> qs(n_qubits);
  std::iota(qs.begin(), qs.end(), 0u);
  QCircuit c;
  for (unsigned i = 0; i < n_gates; ++i) {
    std::shuffle(qs.begin(), qs.end(), rng);
    const unsigned t = qs[0];
    std::vector<unsigned> controls{qs[1], qs[2]};
    if (n_qubits > 4 && rng() % 2 == 0) controls.push_back(qs[3]);
    switch (rng() % 10) {
      case 0: c += gates::X(t, controls); break;
      case 1: c += gates::H(t, controls); break;
      case 2: c += gates::S(t, controls); break;
      case 3: c += gates::T(t, controls); break;
      case 4: c += gates::Rx(Expr(angle(rng)), t, controls); break;
      case 5: c += gates::Ry(Expr(angle(rng)), t, controls); break;
      case 6: c += gates::Phase(Expr(angle(rng)), t, controls); break;
      case 7: {
        const GateTag base = std::array<GateTag, 3>{
            GateTag::X, GateTag::Y, GateTag::Z}[rng() % 3];
        c += gates::Power(base, Expr(expo(rng)), t, controls);
        break;
      }
      case 8: {
        PauliString::FactorMap f{{t, static_cast<PauliAxis>(1 + rng() % 3)}};
        c += gates::ExpPauli(PauliString(std::move(f), 1.0), Expr(angle(rng)),
                             controls);
        break;
      }
      default:
        if (controls.size() == 3) {
          c += gates::SWAP(t, controls.back(),
                           {controls.begin(), controls.end() - 1});
        } else {
          c += gates::Z(t, controls);
        }
        break;
    }
  }
  return c;
}

Eigen::MatrixXcd permutation_unitary(unsigned n,
                                     std::size_t (*image)(std::size_t)) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(image(i), i) = 1.0;
  return m;
}

}  // namespace

TEST_SUITE("compiler") {

TEST_CASE("controlled rz lowers to two opposite half angle occurrences") {
  const Variable a("a");
  const QCircuit lowered =
      compile_controlled_rotation(gates::Rz(Expr(a), 1, {0}));

  std::vector<double> values;
  for (const Gate& g : lowered.gates()) {
    if (!g.is_parametrized()) {
      CHECK(g.tag == GateTag::X);
      CHECK(g.controls == std::vector<unsigned>{0});
      continue;
    }
    CHECK(g.tag == GateTag::Rz);
    CHECK(g.controls.empty());
    values.push_back(g.parameter->evaluate({{a, 0.7}}));
  }
  REQUIRE(values.size() == 2);
  CHECK(values[0] + values[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(values[0]) == doctest::Approx(0.35));

  for (double theta : {0.0, 0.7, -1.3, kPi}) {
    CHECK(unitary_distance(gates::Rz(Expr(a), 1, {0}), lowered, 2,
                           {{a, theta}}) < 1e-12);
  }
}

TEST_CASE("controlled rotation pass preserves unitaries") {
  std::mt19937 rng(81001);
  for (int rep = 0; rep < 10; ++rep) {
    testsupport::RandomCircuitOptions opt;
    opt.n_qubits = 4;
    opt.n_gates = 14;
    opt.n_variables = 2;
    const QCircuit c = testsupport::random_circuit(rng, opt);
    const QCircuit lowered = compile_controlled_rotation(c);
    const Assignment vars{{Variable("a0"), 0.37}, {Variable("a1"), -1.1}};
    CHECK(unitary_distance(c, lowered, opt.n_qubits, vars) < 1e-10);
    CHECK(lowered == compile_controlled_rotation(lowered));
  }
}

TEST_CASE("controlled rotation pass handles several controls directly") {
  // Rotations keep working with two+ controls via a multi-controlled
  // entangler; the parametrized gates still come out uncontrolled.
  std::mt19937 rng(81002);
  std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
  for (GateTag tag : {GateTag::Rx, GateTag::Ry, GateTag::Rz, GateTag::Phase}) {
    const Expr theta(angle(rng));
    QCircuit c;
    switch (tag) {
      case GateTag::Rx: c = gates::Rx(theta, 3, {0, 1, 2}); break;
      case GateTag::Ry: c = gates::Ry(theta, 3, {0, 1, 2}); break;
      case GateTag::Rz: c = gates::Rz(theta, 3, {0, 1, 2}); break;
      default:          c = gates::Phase(theta, 3, {0, 1, 2}); break;
    }
    const QCircuit lowered = compile_controlled_rotation(c);
    CHECK(unitary_distance(c, lowered, 4) < 1e-10);
    CHECK(std::all_of(lowered.gates().begin(), lowered.gates().end(),
                      shift_rule_ready));
  }

  const QCircuit ep = gates::ExpPauli(
      QubitHamiltonian::parse("X(0)Y(1)").terms().front(), Expr(0.9), {2, 3});
  const QCircuit ep_lowered = compile_controlled_rotation(ep);
  CHECK(unitary_distance(ep, ep_lowered, 4) < 1e-10);
  CHECK(std::all_of(ep_lowered.gates().begin(), ep_lowered.gates().end(),
                    shift_rule_ready));
}

TEST_CASE("multi control pass leaves at most one control") {
  std::mt19937 rng(81003);
  for (int rep = 0; rep < 8; ++rep) {
    const unsigned n = 4 + rep % 2;
    const QCircuit c = random_multi_control_circuit(rng, n, 5);
    const QCircuit lowered = compile_multi_control(c);
    CHECK(max_controls(lowered) <= 1);
    CHECK(unitary_distance(c, lowered, n) < 1e-10);
    CHECK(lowered == compile_multi_control(lowered));
  }
}

TEST_CASE("toffoli lowering matches the doubly controlled not") {
  const QCircuit lowered = compile_multi_control(gates::Toffoli(0, 1, 2));
  CHECK(max_controls(lowered) <= 1);
  const Eigen::MatrixXcd want = permutation_unitary(3, [](std::size_t i) {
    return (i & 6) == 6 ? i ^ 1 : i;
  });
  const Eigen::MatrixXcd got = testsupport::circuit_unitary(lowered, 3);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);

  const QCircuit flat = compile_circuit(gates::Toffoli(0, 1, 2),
                                        CompilerConfig::all());
  CHECK((testsupport::circuit_unitary(flat, 3) - want).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK(max_controls(flat) <= 1);
  CHECK(controlled_gates_unparametrized(flat));
}

TEST_CASE("doubly controlled z flips only the all ones amplitude") {
  const QCircuit lowered = compile_multi_control(gates::Z(2, {0, 1}));
  CHECK(max_controls(lowered) <= 1);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(8, 8);
  want(7, 7) = -1.0;
  CHECK((testsupport::circuit_unitary(lowered, 3) - want)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("three controls recurse to the right permutation") {
  const QCircuit lowered = compile_multi_control(gates::X(3, {0, 1, 2}));
  CHECK(max_controls(lowered) <= 1);
  const Eigen::MatrixXcd want = permutation_unitary(4, [](std::size_t i) {
    return (i & 14) == 14 ? i ^ 1 : i;
  });
  CHECK((testsupport::circuit_unitary(lowered, 4) - want)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("doubly controlled swap exchanges target bits") {
  const QCircuit c = gates::SWAP(2, 3, {0, 1});
  const QCircuit lowered = compile_multi_control(c);
  CHECK(max_controls(lowered) <= 1);
  const Eigen::MatrixXcd want = permutation_unitary(4, [](std::size_t i) {
    if ((i & 12) != 12) return i;
    const std::size_t b2 = (i >> 1) & 1, b3 = i & 1;
    return (i & ~std::size_t{3}) | (b3 << 1) | b2;
  });
  CHECK((testsupport::circuit_unitary(lowered, 4) - want)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("power pass reproduces principal branch values") {
  SUBCASE("unit exponent is the plain gate") {
    const QCircuit lowered = compile_power(
        gates::Power(GateTag::X, Expr(1.0), 0));
    Eigen::MatrixXcd want(2, 2);
    want << 0, 1, 1, 0;
    CHECK((testsupport::circuit_unitary(lowered, 1) - want)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("square root of x") {
    const QCircuit lowered = compile_power(
        gates::Power(GateTag::X, Expr(0.5), 0));
    Eigen::MatrixXcd want(2, 2);
    want << cxd(0.5, 0.5), cxd(0.5, -0.5), cxd(0.5, -0.5), cxd(0.5, 0.5);
    CHECK((testsupport::circuit_unitary(lowered, 1) - want)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("fractional z power is a relative phase") {
    const double t = 0.3;
    const QCircuit lowered = compile_power(
        gates::Power(GateTag::Z, Expr(t), 0));
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(2, 2);
    want(1, 1) = std::exp(cxd(0.0, kPi * t));
    CHECK((testsupport::circuit_unitary(lowered, 1) - want)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("controlled power phases only the controlled subspace") {
  const double t = 0.7;
  const QCircuit c = gates::Power(GateTag::Z, Expr(t), 1, {0});
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(4, 4);
  want(3, 3) = std::exp(cxd(0.0, kPi * t));

  const QCircuit after_power = compile_power(c);
  CHECK((testsupport::circuit_unitary(after_power, 2) - want)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  CompilerConfig cfg;
  cfg.power = true;
  cfg.controlled_rotation = true;
  const QCircuit flat = compile_circuit(c, cfg);
  CHECK((testsupport::circuit_unitary(flat, 2) - want).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(std::all_of(flat.gates().begin(), flat.gates().end(),
                    shift_rule_ready));
}

TEST_CASE("power pass preserves unitaries on random circuits") {
  std::mt19937 rng(81004);
  for (int rep = 0; rep < 8; ++rep) {
    testsupport::RandomCircuitOptions opt;
    opt.n_qubits = 4;
    opt.n_gates = 12;
    const QCircuit c = testsupport::random_circuit(rng, opt);
    const QCircuit lowered = compile_power(c);
    CHECK(unitary_distance(c, lowered, opt.n_qubits) < 1e-10);
    CHECK(lowered == compile_power(lowered));
    CHECK(std::none_of(lowered.gates().begin(), lowered.gates().end(),
                       [](const Gate& g) { return g.tag == GateTag::Power; }));
  }
}

TEST_CASE("single z rotation needs no parity ladder") {
  const QCircuit lowered = compile_exp_pauli(gates::ExpPauli(
      QubitHamiltonian::parse("Z(0)").terms().front(), Expr(0.8)));
  REQUIRE(lowered.size() == 1);
  CHECK(lowered.gates()[0].tag == GateTag::Rz);
  CHECK(lowered.gates()[0].targets == std::vector<unsigned>{0});
}

TEST_CASE("two qubit exp pauli becomes basis changes and a parity ladder") {
  const QCircuit c = gates::ExpPauli(
      QubitHamiltonian::parse("X(0)X(1)").terms().front(), Expr(1.1));
  const QCircuit lowered = compile_exp_pauli(c);
  const std::vector<GateTag> tags = [&] {
    std::vector<GateTag> out;
    for (const Gate& g : lowered.gates()) out.push_back(g.tag);
    return out;
  }();
  CHECK(tags == std::vector<GateTag>{GateTag::H, GateTag::H, GateTag::X,
                                     GateTag::Rz, GateTag::X, GateTag::H,
                                     GateTag::H});
  CHECK(unitary_distance(c, lowered, 2) < 1e-12);
}

TEST_CASE("mixed axis exp pauli lowering matches the gate") {
  const QCircuit c = gates::ExpPauli(
      QubitHamiltonian::parse("Y(0)Z(2)").terms().front(), Expr(-0.6));
  const QCircuit lowered = compile_exp_pauli(c);
  CHECK(unitary_distance(c, lowered, 3) < 1e-12);
  for (const Gate& g : lowered.gates()) CHECK(g.tag != GateTag::ExpPauli);
}

TEST_CASE("controlled exp pauli keeps its controls on the z rotation") {
  const QCircuit c = gates::ExpPauli(
      QubitHamiltonian::parse("X(1)Y(2)").terms().front(), Expr(0.7), {0});
  const QCircuit lowered = compile_exp_pauli(c);
  CHECK(unitary_distance(c, lowered, 3) < 1e-12);
  for (const Gate& g : lowered.gates()) {
    if (g.tag == GateTag::Rz) CHECK(g.controls == std::vector<unsigned>{0});
  }
}

TEST_CASE("global phase rotations survive the exp pauli pass") {
  const PauliString identity(PauliString::FactorMap{}, 1.0);
  const QCircuit plain = gates::ExpPauli(identity, Expr(0.9));
  CHECK(compile_exp_pauli(plain) == plain);

  // With a control the phase is no longer global: e^{-i 0.45} lands on the
  // control-one subspace.
  const QCircuit controlled = gates::ExpPauli(identity, Expr(0.9), {1});
  const QCircuit lowered = compile_exp_pauli(controlled);
  REQUIRE(lowered.size() == 1);
  CHECK(lowered.gates()[0].tag == GateTag::Phase);
  CHECK(lowered.gates()[0].controls.empty());
  CHECK(unitary_distance(controlled, lowered, 2) < 1e-12);
}

TEST_CASE("exp pauli pass preserves unitaries on random circuits") {
  std::mt19937 rng(81005);
  for (int rep = 0; rep < 8; ++rep) {
    testsupport::RandomCircuitOptions opt;
    opt.n_qubits = 4;
    opt.n_gates = 12;
    const QCircuit c = testsupport::random_circuit(rng, opt);
    const QCircuit lowered = compile_exp_pauli(c);
    CHECK(unitary_distance(c, lowered, opt.n_qubits) < 1e-10);
    CHECK(lowered == compile_exp_pauli(lowered));
  }
}

TEST_CASE("generalized rotation pass expands controlled factors exactly") {
  std::mt19937 rng(81006);
  const QubitHamiltonian g =
      testsupport::random_pauli_operator(rng, 3, 3, true);
  const QCircuit c =
      gates::GeneralizedRotation(g, Expr(0.85), 2, {3});
  const QCircuit lowered = compile_generalized_rotation(c);
  for (const Gate& e : lowered.gates()) {
    CHECK(e.tag == GateTag::ExpPauli);
    CHECK(e.controls == std::vector<unsigned>{3});
  }
  CHECK(unitary_distance(c, lowered, 4) < 1e-12);
  CHECK(lowered == compile_generalized_rotation(lowered));
}

TEST_CASE("gradient pipeline yields shift rule ready circuits") {
  std::mt19937 rng(81007);
  const CompilerConfig cfg = CompilerConfig::gradient();
  for (int rep = 0; rep < 10; ++rep) {
    testsupport::RandomCircuitOptions opt;
    opt.n_qubits = 4;
    opt.n_gates = 12;
    opt.n_variables = 2;
    opt.with_generalized = true;
    const QCircuit c = testsupport::random_circuit(rng, opt);
    const QCircuit lowered = compile_circuit(c, cfg);
    CHECK(std::all_of(lowered.gates().begin(), lowered.gates().end(),
                      shift_rule_ready));
    const Assignment vars{{Variable("a0"), 0.9}, {Variable("a1"), -0.4}};
    CHECK(unitary_distance(c, lowered, opt.n_qubits, vars) < 1e-10);
  }

  // Multi-controlled parametrized gates stay legal for gradients even though
  // the gradient config never splits control sets apart.
  const QCircuit deep = gates::Ry(Expr(Variable("a0")), 3, {0, 1, 2});
  const QCircuit lowered = compile_circuit(deep, cfg);
  CHECK(std::all_of(lowered.gates().begin(), lowered.gates().end(),
                    shift_rule_ready));
  CHECK(unitary_distance(deep, lowered, 4, {{Variable("a0"), 1.3}}) < 1e-10);
}

TEST_CASE("full pipeline flattens to single control unparametrized entanglers") {
  std::mt19937 rng(81008);
  for (int rep = 0; rep < 6; ++rep) {
    const QCircuit c = random_multi_control_circuit(rng, 4, 4);
    const QCircuit lowered = compile_circuit(c, CompilerConfig::all());
    CHECK(max_controls(lowered) <= 1);
    CHECK(controlled_gates_unparametrized(lowered));
    CHECK(std::all_of(lowered.gates().begin(), lowered.gates().end(),
                      shift_rule_ready));
    CHECK(unitary_distance(c, lowered, 4) < 1e-10);
  }
}

TEST_CASE("empty config leaves the circuit untouched") {
  std::mt19937 rng(81009);
  testsupport::RandomCircuitOptions opt;
  opt.with_generalized = true;
  const QCircuit c = testsupport::random_circuit(rng, opt);
  CHECK(compile_circuit(c, CompilerConfig{}) == c);
}

}  // TEST_SUITE
