#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "varqo/common.hpp"
#include "varqo/dense.hpp"
#include "varqo/wavefunction.hpp"

namespace varqo {

enum class PauliAxis : std::uint8_t { X = 1, Y = 2, Z = 3 };

char axis_char(PauliAxis a);

// Weighted tensor product of single-qubit Pauli factors. The factor map is
// ordered by qubit index; absent qubits act as identity, and an empty map is
// the identity operator.
class PauliString {
 public:
  using FactorMap = std::map<unsigned, PauliAxis>;

  PauliString() : coeff_(1.0) {}
  explicit PauliString(cxd coeff) : coeff_(coeff) {}
  PauliString(FactorMap factors, cxd coeff)
      : factors_(std::move(factors)), coeff_(coeff) {}
  static PauliString single(PauliAxis axis, unsigned qubit, cxd coeff = 1.0);

  const FactorMap& factors() const { return factors_; }
  cxd coefficient() const { return coeff_; }
  PauliString with_coefficient(cxd c) const { return {factors_, c}; }

  bool is_identity() const { return factors_.empty(); }
  unsigned n_qubits() const {
    return factors_.empty() ? 0 : factors_.rbegin()->first + 1;
  }

  // Pauli algebra with phase tracking: XY = iZ, YZ = iX, ZX = iY, A·A = I.
  PauliString operator*(const PauliString& o) const;

  // Action on a computational basis state: P|b> = phase(b)·|b XOR flip_mask>.
  // flip_mask covers the X/Y factors; phase(b) = i^{#Y} · (-1)^{popcount(b & yz_mask)} · coeff.
  std::uint64_t flip_mask(unsigned n_qubits) const;
  std::uint64_t yz_mask(unsigned n_qubits) const;
  cxd basis_phase(std::uint64_t basis_index, unsigned n_qubits) const;

  std::string to_string() const;  // coefficient then factors, e.g. "0.5*X(0)Y(2)"

  bool operator==(const PauliString& o) const {
    return coeff_ == o.coeff_ && factors_ == o.factors_;
  }

 private:
  FactorMap factors_;
  cxd coeff_;
};

// Linear combination of Pauli strings, stored in first-appearance order so
// generator term ordering is caller-controlled (it defines Trotter order).
class QubitHamiltonian {
 public:
  QubitHamiltonian() = default;
  QubitHamiltonian(const PauliString& term) : terms_{term} {}  // NOLINT
  explicit QubitHamiltonian(std::vector<PauliString> terms)
      : terms_(std::move(terms)) {}
  static QubitHamiltonian zero() { return QubitHamiltonian(); }
  static QubitHamiltonian identity(cxd coeff = 1.0) {
    return QubitHamiltonian(PauliString(coeff));
  }

  // Grammar: term ("+"|"-" term)*; term = [coefficient ["*"]] factor*;
  // factor = A "(" qubit ")" with A in {X,Y,Z,I}. Whitespace-insensitive.
  // Coefficients may be real ("1.5"), imaginary ("2i") or complex
  // ("(1+0.5i)"). Errors carry the byte offset of the offending character.
  static QubitHamiltonian parse(const std::string& text);

  const std::vector<PauliString>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  unsigned n_qubits() const;

  QubitHamiltonian simplified(double drop_tol = kCoeffDropTol) const;
  bool is_hermitian(double tol = 1e-10) const;
  QubitHamiltonian dagger() const;

  // (hermitian, antihermitian) parts; per-term coefficient split since Pauli
  // strings themselves are Hermitian.
  std::pair<QubitHamiltonian, QubitHamiltonian> split(
      double drop_tol = kCoeffDropTol) const;

  QubitHamiltonian operator+(const QubitHamiltonian& o) const;
  QubitHamiltonian operator-(const QubitHamiltonian& o) const;
  QubitHamiltonian operator*(const QubitHamiltonian& o) const;
  QubitHamiltonian operator*(cxd scalar) const;
  QubitHamiltonian operator-() const;

  std::string to_string() const;

 private:
  std::vector<PauliString> terms_;
};

inline QubitHamiltonian operator*(cxd scalar, const QubitHamiltonian& h) {
  return h * scalar;
}

// Projectors and flip operators: Q± = (I ± Z(q))/2, σ± = (X(q) ± iY(q))/2.
QubitHamiltonian paulis_qp(unsigned qubit);
QubitHamiltonian paulis_qm(unsigned qubit);
QubitHamiltonian paulis_sp(unsigned qubit);
QubitHamiltonian paulis_sm(unsigned qubit);

// Open-chain Heisenberg model: sum_k Jx X_kX_{k+1} + Jy Y_kY_{k+1}
// + Jz Z_kZ_{k+1} + h sum_k Z_k. `periodic` adds the wraparound couplings.
QubitHamiltonian heisenberg(unsigned n_qubits, double jx, double jy, double jz,
                            double h, bool periodic = false);

// |w><w| expanded into Pauli strings (input is normalized first).
QubitHamiltonian projector(const QubitWaveFunction& w);

// |ket><bra|; generally non-Hermitian. Inputs must be normalized unless
// allow_unnormalized is set.
QubitHamiltonian ketbra(const QubitWaveFunction& ket,
                        const QubitWaveFunction& bra,
                        bool allow_unnormalized = false);

// Arbitrary rectangular matrix binary-encoded into ceil(log2(max(N,M)))
// qubits: sum_ij M_ij |i><j| with zero padding outside the encoded block.
QubitHamiltonian matrix_to_operator(const DenseMatrix& m);

// Dense 2^n x 2^n realization; n_qubits = -1 derives it from the operator.
DenseMatrix to_matrix(const QubitHamiltonian& h, int n_qubits = -1,
                      unsigned dense_limit = 12);

// Binary-symplectic term encoding: X -> (x=1,z=0), Z -> (x=0,z=1), Y -> (1,1).
struct BinarySymplectic {
  unsigned n_qubits = 0;
  std::vector<std::vector<bool>> x_bits;
  std::vector<std::vector<bool>> z_bits;
  std::vector<cxd> coefficients;
};

BinarySymplectic to_symplectic(const QubitHamiltonian& h, int n_qubits = -1);
QubitHamiltonian from_symplectic(const BinarySymplectic& b);

// Term-set equality within a tolerance (compares simplified coefficient maps).
bool approx_equal(const QubitHamiltonian& a, const QubitHamiltonian& b,
                  double tol = 1e-10);

}  // namespace varqo
