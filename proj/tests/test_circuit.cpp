#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_support.hpp"
#include "varqo/circuit.hpp"
#include "varqo/simulator.hpp"

using namespace varqo;
using testsupport::circuit_unitary;
using testsupport::hermitian_exp;
using testsupport::random_state;
using testsupport::state_fidelity;
using testsupport::to_eigen;

namespace {

Eigen::Matrix2cd dense_1q(const QCircuit& c) {
  Eigen::MatrixXcd u = circuit_unitary(c, 1);
  Eigen::Matrix2cd out;
  out << u(0, 0), u(0, 1), u(1, 0), u(1, 1);
  return out;
}

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("construction rejects malformed gates") {
  CHECK_THROWS_WITH_AS(gates::X(0, {0}), doctest::Contains("target and control"),
                       std::invalid_argument);
  CHECK_THROWS_AS(gates::SWAP(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(gates::X(0, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(gates::Power(GateTag::H, Expr(0.5), 0),
                  std::invalid_argument);
  // Generator gates with a control inside the generator support.
  CHECK_THROWS_AS(gates::ExpPauli(PauliString::single(PauliAxis::X, 0), Expr(1.0), {0}),
                  std::invalid_argument);
  // ExpPauli needs a real coefficient.
  CHECK_THROWS_WITH_AS(
      gates::ExpPauli(PauliString::single(PauliAxis::X, 0, cxd(0, 1)), Expr(1.0)),
      doctest::Contains("real"), std::invalid_argument);
  // GeneralizedRotation needs a Hermitian generator.
  CHECK_THROWS_WITH_AS(
      gates::GeneralizedRotation(QubitHamiltonian::parse("1i*X(0)"), Expr(1.0)),
      doctest::Contains("Hermitian"), std::invalid_argument);
  CHECK_THROWS_AS(trotterized(QubitHamiltonian::parse("X(0)"), Expr(1.0), 0),
                  std::invalid_argument);
  // Hand-built gates go through the same validation.
  Gate g;
  g.tag = GateTag::H;
  g.targets = {0};
  g.parameter = Expr(1.0);
  CHECK_THROWS_WITH_AS(QCircuit{g}, doctest::Contains("no parameter"),
                       std::invalid_argument);
}

TEST_CASE("locked rotation matrix conventions") {
  const double a = 0.7123;
  const double h = a / 2.0;

  Eigen::Matrix2cd rz = dense_1q(gates::Rz(Expr(a), 0));
  CHECK(std::abs(rz(0, 0) - std::polar(1.0, -h)) < 1e-12);
  CHECK(std::abs(rz(1, 1) - std::polar(1.0, h)) < 1e-12);
  CHECK(std::abs(rz(0, 1)) < 1e-15);

  Eigen::Matrix2cd ry = dense_1q(gates::Ry(Expr(a), 0));
  CHECK(std::abs(ry(0, 0) - std::cos(h)) < 1e-12);
  CHECK(std::abs(ry(0, 1) + std::sin(h)) < 1e-12);
  CHECK(std::abs(ry(1, 0) - std::sin(h)) < 1e-12);
  CHECK(std::abs(ry(1, 1) - std::cos(h)) < 1e-12);

  Eigen::Matrix2cd rx = dense_1q(gates::Rx(Expr(a), 0));
  CHECK(std::abs(rx(0, 0) - std::cos(h)) < 1e-12);
  CHECK(std::abs(rx(0, 1) - cxd(0, -std::sin(h))) < 1e-12);

  Eigen::Matrix2cd ph = dense_1q(gates::Phase(Expr(a), 0));
  CHECK(std::abs(ph(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(ph(1, 1) - std::polar(1.0, a)) < 1e-12);

  // S and T are fixed phases.
  CHECK((dense_1q(gates::S(0)) - dense_1q(gates::Phase(Expr(kPi / 2), 0)))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((dense_1q(gates::T(0)) - dense_1q(gates::Phase(Expr(kPi / 4), 0)))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Ry(pi)|0> = |1> with a plus sign.
  StateVector out = simulate(gates::Ry(Expr(kPi), 0));
  CHECK(std::abs(out.amplitudes[1] - 1.0) < 1e-12);
}

TEST_CASE("exp-pauli gate equals its closed form") {
  std::mt19937 rng(411);
  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  for (int rep = 0; rep < 20; ++rep) {
    const unsigned n = 1 + rng() % 3;
    PauliString::FactorMap f;
    for (unsigned q = 0; q < n; ++q) {
      int a = static_cast<int>(rng() % 4);
      if (a > 0) f.emplace(q, static_cast<PauliAxis>(a));
    }
    PauliString p(f, 1.0);
    const double a = angle(rng);
    Eigen::MatrixXcd u =
        circuit_unitary(gates::ExpPauli(p, Expr(a)), n);
    Eigen::MatrixXcd expect =
        std::cos(a / 2) *
            Eigen::MatrixXcd::Identity(std::int64_t{1} << n, std::int64_t{1} << n) -
        cxd(0, std::sin(a / 2)) * to_eigen(to_matrix(QubitHamiltonian(p), n));
    CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exp-pauli folds the string coefficient into the angle") {
  PauliString scaled({{0, PauliAxis::X}, {1, PauliAxis::Y}}, 0.7);
  PauliString unit({{0, PauliAxis::X}, {1, PauliAxis::Y}}, 1.0);
  const double a = 1.234;
  Eigen::MatrixXcd u1 = circuit_unitary(gates::ExpPauli(scaled, Expr(a)), 2);
  Eigen::MatrixXcd u2 =
      circuit_unitary(gates::ExpPauli(unit, Expr(0.7 * a)), 2);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generalized rotation with one term is an exact exp-pauli") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  QubitHamiltonian g = QubitHamiltonian::parse("0.8*Y(0)X(1)");
  for (int rep = 0; rep < 20; ++rep) {
    const double a = angle(rng);
    Eigen::MatrixXcd u =
        circuit_unitary(gates::GeneralizedRotation(g, Expr(a), 1), 2);
    Eigen::MatrixXcd oracle =
        hermitian_exp(to_eigen(to_matrix(g, 2)), cxd(0, -a / 2));
    CHECK((u - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("trotter error falls off with the step count") {
  // Non-commuting generator: the product formula is an approximation whose
  // error shrinks roughly like 1/steps.
  QubitHamiltonian g = QubitHamiltonian::parse("X(0) + Z(0) + 0.5*Z(0)Z(1)");
  const double a = 1.3;
  Eigen::MatrixXcd oracle =
      hermitian_exp(to_eigen(to_matrix(g, 2)), cxd(0, -a / 2));
  double previous = -1.0;
  std::vector<double> errs;
  for (unsigned steps : {1u, 2u, 4u, 8u}) {
    Eigen::MatrixXcd u =
        circuit_unitary(gates::GeneralizedRotation(g, Expr(a), steps), 2);
    const double err = (u - oracle).cwiseAbs().maxCoeff();
    if (previous >= 0) CHECK(err < previous);
    errs.push_back(err);
    previous = err;
  }
  CHECK(errs.back() < errs.front() / 4.0);

  // Commuting generator: exact already at one step.
  QubitHamiltonian comm = QubitHamiltonian::parse("Z(0) + 0.25*Z(0)Z(1)");
  Eigen::MatrixXcd u =
      circuit_unitary(gates::GeneralizedRotation(comm, Expr(a), 1), 2);
  Eigen::MatrixXcd exact =
      hermitian_exp(to_eigen(to_matrix(comm, 2)), cxd(0, -a / 2));
  CHECK((u - exact).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trotterized free function matches the gate") {
  QubitHamiltonian g = QubitHamiltonian::parse("X(0) + Z(0)");
  Eigen::MatrixXcd a =
      circuit_unitary(gates::GeneralizedRotation(g, Expr(0.9), 4), 1);
  Eigen::MatrixXcd b = circuit_unitary(trotterized(g, Expr(0.9), 4), 1);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("concatenation is circuit order, first gate acts first") {
  // X then H sends |0> to H X |0> = (|0> - |1>)/sqrt(2).
  const double r = std::sqrt(0.5);
  StateVector out = simulate(gates::X(0) + gates::H(0));
  CHECK(std::abs(out.amplitudes[0] - r) < 1e-12);
  CHECK(std::abs(out.amplitudes[1] + r) < 1e-12);
}

TEST_CASE("dagger inverts random circuits") {
  std::mt19937 rng(1932);
  testsupport::RandomCircuitOptions opt;
  opt.n_qubits = 5;
  opt.n_gates = 25;
  opt.with_generalized = true;
  for (int rep = 0; rep < 8; ++rep) {
    QCircuit c = testsupport::random_circuit(rng, opt);
    StateVector psi = random_state(rng, 5);
    StateVector forward = simulate(c + c.dagger(), {}, &psi);
    CHECK(state_fidelity(psi, forward) > 1.0 - 1e-10);
  }
}

TEST_CASE("dagger maps fixed gates to their adjoints") {
  QCircuit c = gates::S(0) + gates::T(1, {0}) + gates::Rx(Expr(0.3), 1);
  QCircuit d = c.dagger();
  REQUIRE(d.size() == 3);
  CHECK(d.gates()[0].tag == GateTag::Rx);
  CHECK(d.gates()[1].tag == GateTag::Phase);
  CHECK(d.gates()[1].controls == std::vector<unsigned>{0});
  CHECK(d.gates()[1].parameter->constant_value() == doctest::Approx(-kPi / 4));
  CHECK(d.gates()[2].tag == GateTag::Phase);

  // Double dagger is a structural fixed point for rotation circuits.
  QCircuit r = gates::Rx(Expr(Variable("a")), 0) + gates::CNOT(0, 1) +
               gates::ExpPauli(PauliString::single(PauliAxis::Y, 1), Expr(0.4));
  CHECK(r.dagger().dagger() == r);
}

TEST_CASE("variable extraction and relabeling") {
  Variable a("a"), b("b");
  QCircuit c = gates::Ry(Expr(a) * Expr(2.0), 0) +
               gates::Rz(Expr(b) + Expr(a), 1) + gates::CNOT(0, 1);
  auto vars = c.extract_variables();
  REQUIRE(vars.size() == 2);
  CHECK(vars.count(a) == 1);
  CHECK(vars.count(b) == 1);

  std::map<Variable, Variable> renaming{{a, Variable("a", "r1")},
                                        {b, Variable("b", "r1")}};
  QCircuit relabeled = c.map_variables(renaming);
  auto rvars = relabeled.extract_variables();
  CHECK(rvars.count(Variable("a", "r1")) == 1);
  CHECK(rvars.count(a) == 0);

  // Matched assignments give identical states.
  Assignment orig{{a, 0.37}, {b, -1.1}};
  Assignment renamed{{Variable("a", "r1"), 0.37}, {Variable("b", "r1"), -1.1}};
  StateVector s1 = simulate(c, orig);
  StateVector s2 = simulate(relabeled, renamed);
  CHECK(state_fidelity(s1, s2) > 1.0 - 1e-12);

  QCircuit substituted =
      c.substitute_parameters({{a, Expr(0.37)}, {b, Expr(-1.1)}});
  CHECK(substituted.extract_variables().empty());
  CHECK(state_fidelity(s1, simulate(substituted)) > 1.0 - 1e-12);
}

TEST_CASE("text format round trips") {
  QCircuit c = gates::H(0) + gates::CNOT(0, 1) +
               gates::Ry(Expr(Variable("theta")), 0) +
               gates::Rz(Expr(Variable("phi", "g2")) * Expr(0.5), 1, {0, 2}) +
               gates::SWAP(0, 2) + gates::T(2) +
               gates::Power(GateTag::Y, Expr(0.25), 1) +
               gates::ExpPauli(PauliString({{0, PauliAxis::X}, {2, PauliAxis::Y}}, 1.0),
                               Expr(Variable("theta")), {1}) +
               gates::GeneralizedRotation(
                   QubitHamiltonian::parse("X(0)X(1) + 0.5*Z(0)"), Expr(0.7), 3);
  const std::string text = c.to_text();
  QCircuit parsed = QCircuit::from_text(text);
  CHECK(parsed == c);
  CHECK(parsed.to_text() == text);
}

TEST_CASE("text format accepts the documented spellings") {
  QCircuit c = QCircuit::from_text(R"(
    # comment lines and blanks are skipped
    H 0
    CNOT 1 | 0
    CZ 1 | 0
    Toffoli 2 | 0 1
    Ry(theta) 0
    Rz(2*pi) 1
    Phase(pi/4) 0 | 1
    SWAP 0 1
    X 2 | 0 1
    Power(Z, 0.5) 1
    ExpPauli(0.5, X0Y1)
    ExpPauli(a, I) | 0
    GeneralizedRotation(a, X(0)X(1) + 0.5*Z(0)) ; steps=2
  )");
  REQUIRE(c.size() == 13);
  CHECK(c.gates()[1].tag == GateTag::X);
  CHECK(c.gates()[1].targets == std::vector<unsigned>{1});
  CHECK(c.gates()[1].controls == std::vector<unsigned>{0});
  CHECK(c.gates()[3].controls == std::vector<unsigned>{0, 1});
  CHECK(c.gates()[10].generator->terms()[0].factors() ==
        PauliString::FactorMap{{0, PauliAxis::X}, {1, PauliAxis::Y}});
  CHECK(c.gates()[11].targets.empty());  // identity generator
  CHECK(c.gates()[12].trotter_steps == 2);

  // "CNOT 1 | 0" flips the target when the control is set.
  QCircuit cnot = QCircuit::from_text("CNOT 1 | 0");
  StateVector in = StateVector::from_wavefunction(
      QubitWaveFunction::parse("1.0|10>"));
  StateVector out = simulate(cnot, {}, &in);
  CHECK(std::abs(out.amplitudes[QubitWaveFunction::index_of("11")] - 1.0) <
        1e-12);
}

TEST_CASE("text format rejects malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(QCircuit::from_text("Foo 0"),
                       doctest::Contains("unknown gate 'Foo'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(QCircuit::from_text("H 0\nH zzz"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("H 0 ; steps=3"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("H 0 |"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("Ry(0.5 0"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("Ry() 0"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("CNOT 1"), std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("ExpPauli(0.5, X0X0)"),
                  std::invalid_argument);
  CHECK_THROWS_AS(QCircuit::from_text("GeneralizedRotation(a, X(0)) ; steps=0"),
                  std::invalid_argument);
}

TEST_CASE("parameter expression grammar") {
  Assignment vars{{Variable("a"), 0.5}, {Variable("b", "l1"), 2.0}};
  CHECK(parse_expression("2*a + b@l1^2").evaluate(vars) ==
        doctest::Approx(5.0));
  CHECK(parse_expression("-a^2").evaluate(vars) == doctest::Approx(-0.25));
  CHECK(parse_expression("pi/2").evaluate({}) == doctest::Approx(kPi / 2));
  CHECK(parse_expression("sin(a) + cos(0)").evaluate(vars) ==
        doctest::Approx(std::sin(0.5) + 1.0));
  CHECK(parse_expression("sqrt(square(a))").evaluate(vars) ==
        doctest::Approx(0.5));
  CHECK(parse_expression("(1 + 2)*(3 - 4)").evaluate({}) ==
        doctest::Approx(-3.0));
  CHECK(parse_expression("2^-1").evaluate({}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_expression("2 +"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression("foo(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_expression("1 2"), std::invalid_argument);

  // Emitted parameter expressions reparse to the same structure.
  Expr e = Expr(0.5) * Expr(Variable("a")) + sin(Expr(Variable("b", "l1")));
  CHECK(parse_expression(e.to_string()).same_structure(e));
}

TEST_CASE("circuit size bookkeeping") {
  QCircuit c;
  CHECK(c.empty());
  CHECK(c.n_qubits() == 0);
  c += gates::H(3);
  CHECK(c.n_qubits() == 4);
  c += gates::CNOT(5, 1);
  CHECK(c.n_qubits() == 6);
  CHECK(c.size() == 2);
  CHECK(c.structural_hash() == (gates::H(3) + gates::CNOT(5, 1)).structural_hash());
  CHECK(c.structural_hash() != (gates::H(3) + gates::CNOT(1, 5)).structural_hash());
}

}  // TEST_SUITE
