#include "varqo/objective.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "varqo/wavefunction.hpp"

using namespace varqo;

namespace {

double finite_difference(const CompiledObjective& f, Assignment vars,
                         const Variable& v, double step = 1e-6) {
  Assignment plus = vars, minus = vars;
  plus[v] += step;
  minus[v] -= step;
  return (f(plus) - f(minus)) / (2.0 * step);
}

const Variable kA("a");

Objective cosine_objective() {
  return make_expectation(gates::Ry(Expr(kA), 0),
                          QubitHamiltonian::parse("Z(0)"));
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("ry expectation traces the cosine curve") {
  const CompiledObjective f = compile(cosine_objective());
  for (double a = -3.0; a <= 3.0; a += 0.375)
    CHECK(std::abs(f({{kA, a}}) - std::cos(a)) < 1e-12);
}

TEST_CASE("projector expectations report overlaps") {
  CHECK(compile(make_expectation(QCircuit{}, paulis_qp(0)))({}) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const QCircuit bell_prep = gates::H(0) + gates::CX(0, 1);
  const QubitWaveFunction bell =
      QubitWaveFunction::parse("1|00> + 1|11>").normalized();
  CHECK(compile(make_expectation(bell_prep, projector(bell)))({}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non hermitian hamiltonians are rejected") {
  CHECK_THROWS_AS(
      make_expectation(QCircuit{}, QubitHamiltonian::parse("1i*Z(0)")),
      std::invalid_argument);
}

TEST_CASE("gradient of the cosine curve is minus sine") {
  const Objective g = grad(cosine_objective(), kA);
  CHECK(g.handles().size() == 2);
  const CompiledObjective dg = compile(g);
  CHECK(std::abs(dg({{kA, 0.0}})) < 1e-12);
  CHECK(std::abs(dg({{kA, kPi / 2}}) - (-1.0)) < 1e-12);
  for (double a = -2.0; a <= 2.0; a += 0.5)
    CHECK(std::abs(dg({{kA, a}}) + std::sin(a)) < 1e-8);
}

TEST_CASE("second derivative of the cosine curve is minus cosine") {
  const Objective g2 = grad(grad(cosine_objective(), kA), kA);
  const CompiledObjective f = compile(g2);
  CHECK(std::abs(f({{kA, 0.0}}) - (-1.0)) < 1e-10);
  CHECK(std::abs(f({{kA, 0.4}}) + std::cos(0.4)) < 1e-10);
}

TEST_CASE("controlled ry gradients pass through circuit lowering") {
  const QCircuit c = gates::H(0) + gates::Ry(Expr(kA), 1, {0});
  const Objective o = make_expectation(c, QubitHamiltonian::parse("Z(1)"));
  const Objective g = grad(o, kA);
  // The lowered circuit carries the variable twice (half angles of opposite
  // sign), each occurrence shifted both ways.
  CHECK(g.handles().size() == 4);

  const CompiledObjective f = compile(o);
  const CompiledObjective df = compile(g);
  for (double a : {0.0, 0.6, -1.2, 2.5}) {
    CHECK(std::abs(df({{kA, a}}) - finite_difference(f, {{kA, a}}, kA)) <
          1e-6);
  }
}

TEST_CASE("objective arithmetic keeps one table entry per expectation") {
  const Objective e0 = make_expectation(gates::Rx(Expr(kA), 0),
                                        QubitHamiltonian::parse("Z(0)"));
  const Objective e1 = make_expectation(gates::H(0),
                                        QubitHamiltonian::parse("X(0)"));
  const Objective e2 = make_expectation(gates::Ry(Expr(kA), 0),
                                        QubitHamiltonian::parse("Y(0)"));
  const Objective o3 = pow(e0 + e1, Objective(0.5) * e2 * e2);
  CHECK(o3.handles().size() == 3);

  const Assignment at{{kA, 0.9}};
  const double v0 = compile(e0)(at), v1 = compile(e1)(at), v2 = compile(e2)(at);
  CHECK(compile(o3)(at) ==
        doctest::Approx(std::pow(v0 + v1, 0.5 * v2 * v2)).epsilon(1e-12));
}

TEST_CASE("adding an objective to itself evaluates each expectation once") {
  const Objective o = cosine_objective();
  const CompiledObjective f = compile(o);
  const CompiledObjective f2 = compile(o + o);
  const Assignment at{{kA, 0.3}};
  const double single = f(at);
  CHECK(f.last_stats().expectation_evaluations == 1);
  CHECK(f2(at) == doctest::Approx(2.0 * single).epsilon(1e-14));
  CHECK(f2.last_stats().expectation_evaluations == 1);
}

TEST_CASE("interning returns the same handle for equal inputs") {
  const Objective a = cosine_objective();
  const Objective b = cosine_objective();
  CHECK(a.handles() == b.handles());
  const auto table = a.expectation_values();
  REQUIRE(table.size() == 1);
  CHECK(table.begin()->second.circuit == gates::Ry(Expr(kA), 0));
  CHECK(table.begin()->second.hamiltonian.to_string() ==
        QubitHamiltonian::parse("Z(0)").to_string());
}

TEST_CASE("absent variables differentiate to the zero objective") {
  const Objective g = grad(cosine_objective(), Variable("missing"));
  CHECK(g.expr().is_zero());
  CHECK(g.handles().empty());
  CHECK(compile(g)({{kA, 1.0}}) == 0.0);
}

TEST_CASE("expression level variables mix with circuit gradients") {
  // O = a * <Z>_{Ry(a)} = a cos a, dO/da = cos a - a sin a.
  const Objective o = Objective(kA) * cosine_objective();
  const CompiledObjective df = compile(grad(o, kA));
  for (double a : {0.0, 0.8, -1.7})
    CHECK(std::abs(df({{kA, a}}) - (std::cos(a) - a * std::sin(a))) < 1e-10);
}

TEST_CASE("unary function application differentiates by chain rule") {
  const Objective o = cosine_objective().apply(UnaryFn::Exp);
  const CompiledObjective f = compile(o);
  const CompiledObjective df = compile(grad(o, kA));
  const double a = 0.65;
  CHECK(f({{kA, a}}) == doctest::Approx(std::exp(std::cos(a))).epsilon(1e-12));
  CHECK(std::abs(df({{kA, a}}) - (-std::sin(a) * std::exp(std::cos(a)))) <
        1e-10);
}

TEST_CASE("power gate exponents are differentiable") {
  // <Z> after X^a is cos(pi a); the controlled version halves the swing.
  const Objective o = make_expectation(
      gates::Power(GateTag::X, Expr(kA), 0), QubitHamiltonian::parse("Z(0)"));
  const CompiledObjective df = compile(grad(o, kA));
  CHECK(std::abs(df({{kA, 0.3}}) - (-kPi * std::sin(0.3 * kPi))) < 1e-8);

  const Objective oc = make_expectation(
      gates::H(0) + gates::Power(GateTag::X, Expr(kA), 1, {0}),
      QubitHamiltonian::parse("Z(1)"));
  const CompiledObjective fc = compile(oc);
  const CompiledObjective dfc = compile(grad(oc, kA));
  for (double a : {0.25, 1.4}) {
    CHECK(std::abs(fc({{kA, a}}) - 0.5 * (1.0 + std::cos(kPi * a))) < 1e-12);
    CHECK(std::abs(dfc({{kA, a}}) - (-kPi / 2 * std::sin(kPi * a))) < 1e-8);
  }
}

TEST_CASE("gradients match finite differences on random circuits") {
  std::mt19937 rng(71001);
  for (int rep = 0; rep < 6; ++rep) {
    testsupport::RandomCircuitOptions opt;
    opt.n_qubits = 4;
    opt.n_gates = 10;
    opt.n_variables = 3;
    opt.with_generalized = true;
    const QCircuit c = testsupport::random_circuit(rng, opt);
    const QubitHamiltonian h =
        testsupport::random_pauli_operator(rng, opt.n_qubits, 5, true);
    const Objective o = make_expectation(c, h);
    const CompiledObjective f = compile(o);

    Assignment at;
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    for (const Variable& v : o.extract_variables()) at[v] = angle(rng);

    for (const Variable& v : o.extract_variables()) {
      const double analytic = compile(grad(o, v))(at);
      const double numeric = finite_difference(f, at, v, 1e-5);
      CHECK(std::abs(analytic - numeric) < 1e-5);
    }
  }
}

TEST_CASE("second derivatives match nested finite differences") {
  std::mt19937 rng(71002);
  testsupport::RandomCircuitOptions opt;
  opt.n_qubits = 3;
  opt.n_gates = 6;
  opt.n_variables = 2;
  const QCircuit c = testsupport::random_circuit(rng, opt);
  const Objective o = make_expectation(
      c, testsupport::random_pauli_operator(rng, 3, 4, true));
  Assignment at;
  for (const Variable& v : o.extract_variables()) at[v] = 0.4;
  for (const Variable& v : o.extract_variables()) {
    const CompiledObjective dg = compile(grad(o, v));
    const double analytic2 = compile(grad(grad(o, v), v))(at);
    const double numeric2 = finite_difference(dg, at, v, 1e-4);
    CHECK(std::abs(analytic2 - numeric2) < 1e-4);
  }
}

TEST_CASE("sampled evaluation is statistically sound and seeded") {
  const Objective o = cosine_objective();
  const CompiledObjective f = compile(o, 100000, std::nullopt, 11);
  const Assignment at{{kA, 1.0}};
  const double sampled = f(at);
  CHECK(std::abs(sampled - std::cos(1.0)) < 0.01);
  CHECK(f(at) == sampled);

  // Per-call override uses fewer shots but stays deterministic.
  const double coarse = f(at, 500);
  CHECK(f(at, 500) == coarse);
  CHECK(std::abs(coarse - std::cos(1.0)) < 0.15);
}

TEST_CASE("noise needs samples and shifts sampled values") {
  const Objective o =
      make_expectation(gates::X(0), QubitHamiltonian::parse("Z(0)"));
  NoiseModel noise;
  noise += QuantumNoise::bit_flip(0.1, 1);
  CHECK_THROWS_AS(compile(o, std::nullopt, noise), std::invalid_argument);

  const CompiledObjective f = compile(o, 100000, noise, 3);
  CHECK(std::abs(f({}) - (-0.8)) < 0.02);
}

TEST_CASE("measurement grouping changes the plan but not the value") {
  const QCircuit c = gates::Ry(Expr(0.7), 0) + gates::CX(0, 1);
  const QubitHamiltonian h =
      QubitHamiltonian::parse("X(0)X(1) + Z(0) + Z(0)Z(1)");
  const Objective plain = make_expectation(c, h, false);
  const Objective grouped = make_expectation(c, h, true);
  CHECK(plain.handles() != grouped.handles());
  CHECK(compile(plain)({}) == compile(grouped)({}));

  const double exact = compile(plain)({});
  CHECK(std::abs(compile(plain, 200000, std::nullopt, 2)({}) - exact) < 0.03);
  CHECK(std::abs(compile(grouped, 200000, std::nullopt, 2)({}) - exact) < 0.03);
}

TEST_CASE("objectives reject unresolved gradient markers") {
  CHECK_THROWS_AS(Objective(Expr::gradient_marker(0, kA)),
                  std::invalid_argument);
}

}  // TEST_SUITE
