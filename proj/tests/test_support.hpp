#pragma once

// Shared oracle utilities for the test suite. Dense linear algebra goes
// through Eigen so expected values are produced by an independent code path
// from the library under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <random>
#include <vector>

#include "varqo/circuit.hpp"
#include "varqo/dense.hpp"
#include "varqo/pauli.hpp"
#include "varqo/simulator.hpp"

namespace testsupport {

inline Eigen::MatrixXcd to_eigen(const varqo::DenseMatrix& m) {
  Eigen::MatrixXcd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

inline varqo::DenseMatrix from_eigen(const Eigen::MatrixXcd& e) {
  varqo::DenseMatrix m(static_cast<std::size_t>(e.rows()),
                       static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

// Ascending real eigenvalues of a Hermitian operator.
inline std::vector<double> hermitian_eigenvalues(const varqo::DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m));
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  return out;
}

// exp(scale * H) for Hermitian H via spectral decomposition; scale may be
// complex (e.g. -i*a/2 for rotation oracles).
inline Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& h,
                                      std::complex<double> scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  Eigen::VectorXcd d(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    d(i) = std::exp(scale * solver.eigenvalues()(i));
  return solver.eigenvectors() * d.asDiagonal() *
         solver.eigenvectors().adjoint();
}

// Uniformly random Pauli operator: `n_terms` strings over up to `n_qubits`
// qubits with coefficients in the given box.
inline varqo::QubitHamiltonian random_pauli_operator(
    std::mt19937& rng, unsigned n_qubits, unsigned n_terms,
    bool real_coefficients = false, double coeff_scale = 1.0) {
  std::uniform_int_distribution<int> axis(0, 3);
  std::uniform_real_distribution<double> coeff(-coeff_scale, coeff_scale);
  std::vector<varqo::PauliString> terms;
  for (unsigned t = 0; t < n_terms; ++t) {
    varqo::PauliString::FactorMap f;
    for (unsigned q = 0; q < n_qubits; ++q) {
      int a = axis(rng);
      if (a > 0) f.emplace(q, static_cast<varqo::PauliAxis>(a));
    }
    varqo::cxd c = real_coefficients ? varqo::cxd(coeff(rng), 0.0)
                                     : varqo::cxd(coeff(rng), coeff(rng));
    terms.emplace_back(std::move(f), c);
  }
  return varqo::QubitHamiltonian(std::move(terms)).simplified();
}

// Max |entry| of the difference between two operators' dense forms.
inline double dense_distance(const varqo::QubitHamiltonian& a,
                             const varqo::QubitHamiltonian& b, int n_qubits) {
  return varqo::to_matrix(a, n_qubits).max_abs_diff(varqo::to_matrix(b, n_qubits));
}

// Dense unitary of a circuit, column by column through the simulator.
inline Eigen::MatrixXcd circuit_unitary(const varqo::QCircuit& c, unsigned n,
                                        const varqo::Assignment& vars = {}) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    varqo::StateVector init(n);
    init.amplitudes.assign(dim, varqo::cxd(0.0));
    init.amplitudes[col] = 1.0;
    varqo::StateVector out = varqo::simulate(c, vars, &init);
    for (std::size_t row = 0; row < dim; ++row) u(row, col) = out.amplitudes[row];
  }
  return u;
}

inline varqo::StateVector random_state(std::mt19937& rng, unsigned n) {
  std::normal_distribution<double> g(0.0, 1.0);
  varqo::StateVector sv(n);
  for (auto& a : sv.amplitudes) a = varqo::cxd(g(rng), g(rng));
  const double nrm = std::sqrt(sv.norm_sqr());
  for (auto& a : sv.amplitudes) a /= nrm;
  return sv;
}

inline double state_fidelity(const varqo::StateVector& a,
                             const varqo::StateVector& b) {
  varqo::cxd inner = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    inner += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return std::abs(inner);
}

struct RandomCircuitOptions {
  unsigned n_qubits = 4;
  unsigned n_gates = 12;
  unsigned n_variables = 0;        // 0: all angles numeric
  bool with_controls = true;
  bool with_exp_pauli = true;
  bool with_power = true;
  bool with_generalized = false;
};

// Random circuit over the full gate set; variable-parametrized rotations draw
// angles of the form scale*v with v from a fixed pool a0..a{k-1}.
inline varqo::QCircuit random_circuit(std::mt19937& rng,
                                      const RandomCircuitOptions& opt) {
  using namespace varqo;
  std::uniform_real_distribution<double> angle(-2.0 * kPi, 2.0 * kPi);
  std::uniform_real_distribution<double> scale(0.3, 1.7);
  std::uniform_int_distribution<unsigned> qubit(0, opt.n_qubits - 1);
  QCircuit c;
  for (unsigned i = 0; i < opt.n_gates; ++i) {
    const unsigned t = qubit(rng);
    std::vector<unsigned> controls;
    if (opt.with_controls && opt.n_qubits > 1 && rng() % 3 == 0) {
      unsigned ctrl = qubit(rng);
      if (ctrl != t) controls.push_back(ctrl);
    }
    Expr theta = [&]() -> Expr {
      if (opt.n_variables > 0 && rng() % 2 == 0) {
        Variable v(varqo::detail::str("a", rng() % opt.n_variables));
        return Expr(scale(rng)) * Expr(v);
      }
      return Expr(angle(rng));
    }();
    switch (rng() % 10) {
      case 0: c += gates::H(t, controls); break;
      case 1: c += gates::X(t, controls); break;
      case 2: c += gates::S(t, controls); break;
      case 3: c += gates::Rx(theta, t, controls); break;
      case 4: c += gates::Ry(theta, t, controls); break;
      case 5: c += gates::Rz(theta, t, controls); break;
      case 6: c += gates::Phase(theta, t, controls); break;
      case 7: {
        if (!opt.with_exp_pauli) { c += gates::Ry(theta, t, controls); break; }
        PauliString::FactorMap f;
        for (unsigned q = 0; q < opt.n_qubits; ++q) {
          if (std::find(controls.begin(), controls.end(), q) != controls.end())
            continue;
          int a = static_cast<int>(rng() % 4);
          if (a > 0) f.emplace(q, static_cast<PauliAxis>(a));
        }
        c += gates::ExpPauli(PauliString(std::move(f), 1.0), theta, controls);
        break;
      }
      case 8: {
        if (!opt.with_power) { c += gates::Rz(theta, t, controls); break; }
        GateTag base = std::array<GateTag, 3>{GateTag::X, GateTag::Y,
                                              GateTag::Z}[rng() % 3];
        std::uniform_real_distribution<double> expo(-1.5, 1.5);
        c += gates::Power(base, Expr(expo(rng)), t, controls);
        break;
      }
      default: {
        if (!opt.with_generalized || opt.n_qubits < 2) {
          c += gates::Ry(theta, t, controls);
          break;
        }
        std::vector<PauliString> terms;
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);
        for (int k = 0; k < 2; ++k) {
          PauliString::FactorMap f;
          for (unsigned q = 0; q < opt.n_qubits; ++q) {
            if (std::find(controls.begin(), controls.end(), q) !=
                controls.end())
              continue;
            int a = static_cast<int>(rng() % 4);
            if (a > 0) f.emplace(q, static_cast<PauliAxis>(a));
          }
          terms.emplace_back(std::move(f), cxd(coeff(rng), 0.0));
        }
        c += gates::GeneralizedRotation(QubitHamiltonian(std::move(terms)),
                                        theta, 1 + rng() % 3, controls);
        break;
      }
    }
  }
  return c;
}

}  // namespace testsupport
