#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varqo/circuit.hpp"
#include "varqo/objective.hpp"
#include "varqo/pauli.hpp"

namespace varqo {

// Molecular integrals in the spatial-orbital basis, all values in Hartree.
// h is n x n row-major; g is the n^4 two-electron tensor in Mulliken order,
// g[((p*n+q)*n+r)*n+s] = (pq|rs). Real orbitals are assumed, so g must carry
// the 8-fold index symmetry and h must be symmetric (validated to 1e-8).
struct Molecule {
  unsigned n_orbitals = 0;
  unsigned n_electrons = 0;
  double e_nuc = 0.0;
  std::vector<double> h;
  std::vector<double> g;

  // Spatial orbitals kept when building operators; unset means all.
  std::optional<std::vector<unsigned>> active;

  // Doubly occupied spatial orbitals of the reference determinant. Empty
  // means the first n_electrons/2 orbitals.
  std::vector<unsigned> reference_occ;

  std::string geometry;  // free-form provenance metadata

  double one_body(unsigned p, unsigned q) const;
  double two_body(unsigned p, unsigned q, unsigned r, unsigned s) const;

  // reference_occ with the default filled in.
  std::vector<unsigned> occupied() const;

  // Dimension, symmetry, and index-range checks; throws invalid_argument.
  void validate() const;

  static Molecule from_json(const std::string& text);
  static Molecule load_file(const std::string& path);
  std::string to_json() const;
};

// One product of ladder operators, leftmost factor outermost: ops
// {(0,true),(1,false)} with coefficient c is c * a^dag_0 a_1.
struct FermionTerm {
  std::vector<std::pair<unsigned, bool>> ops;  // (spin orbital, dagger)
  cxd coefficient = 1.0;
};

// Sum of ladder products. The algebra tracks products verbatim;
// anticommutation enters through normal_ordered() and the Jordan-Wigner
// image, which agree on every operator (tested densely).
class FermionOperator {
 public:
  FermionOperator() = default;
  explicit FermionOperator(std::vector<FermionTerm> terms)
      : terms_(std::move(terms)) {}

  static FermionOperator identity(cxd coeff = 1.0);
  static FermionOperator create(unsigned p);
  static FermionOperator annihilate(unsigned p);

  const std::vector<FermionTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  unsigned n_modes() const;  // largest index + 1, 0 when purely scalar

  FermionOperator adjoint() const;

  // Rewrites into the canonical form: creation operators left of
  // annihilation operators, each block strictly descending in index, using
  // {a_p, a^dag_q} = delta_pq. Like terms are combined, vanishing products
  // (repeated same-type index) and tiny coefficients dropped.
  FermionOperator normal_ordered(double drop_tol = 1e-14) const;

  FermionOperator operator+(const FermionOperator& o) const;
  FermionOperator operator-(const FermionOperator& o) const;
  FermionOperator operator*(const FermionOperator& o) const;
  FermionOperator operator*(cxd scalar) const;
  FermionOperator operator-() const { return *this * cxd(-1.0); }

 private:
  std::vector<FermionTerm> terms_;
};

inline FermionOperator operator*(cxd scalar, const FermionOperator& f) {
  return f * scalar;
}

// a_p -> 1/2 (X_p + i Y_p) Z_{p-1} ... Z_0, creation as the adjoint; spin
// orbital p lives on qubit p. Products expand through the Pauli algebra and
// the result is simplified.
QubitHamiltonian jordan_wigner(const FermionOperator& f);

// Frozen-core reduction onto the active spatial orbitals. Occupied orbitals
// outside the active list are folded into the one-body integrals and a
// constant shift on e_nuc; unoccupied ones are discarded. Returns a
// self-contained molecule (active unset) with reindexed orbitals.
Molecule fold_active(const Molecule& mol);

// Second-quantized Hamiltonian in the (folded) active space, encoded with
// interleaved spins (spatial p -> spin orbitals 2p up, 2p+1 down) and
// Jordan-Wigner. The Mulliken tensor enters as
//   H = sum h_pq a^dag_ps a_qs + 1/2 sum (pq|rs) a^dag_ps a^dag_rt a_st a_qs
// summed over spins s,t, with e_nuc on the identity term.
QubitHamiltonian make_hamiltonian(const Molecule& mol);

using ExcitationIndices = std::vector<std::pair<unsigned, unsigned>>;

// Hermitian generator i(prod_n a^dag_{p_n} a_{q_n} - h.c.) under
// Jordan-Wigner. All indices across the pairs must be distinct.
QubitHamiltonian make_excitation_generator(const ExcitationIndices& indices);

// exp(-i angle/2 G) for the generator above. Its Pauli strings commute, so a
// single Trotter step is exact.
QCircuit make_excitation_gate(const ExcitationIndices& indices, Expr angle);

// X gates filling the reference determinant: both spin orbitals of every
// occupied spatial orbital.
QCircuit prepare_reference(const Molecule& mol);

// k-UpCCGSD: reference preparation, then per layer and per spatial pair
// p < q (ascending) one paired double excitation gate on
// [(2p,2q),(2p+1,2q+1)] with its own variable, followed (when
// include_singles) by the two spin singles (2p,2q) and (2p+1,2q+1) sharing
// one spin-adapted variable. Variables are named D_p_q / S_p_q and labelled
// by layer, independent across layers.
QCircuit make_upccgsd_ansatz(const Molecule& mol, unsigned layers = 1,
                             bool include_singles = true);

// <H>_u minus sum_i E_i * <P0>_{u_i^dag u}, where P0 projects every qubit of
// the register onto |0>. With previous states (E_i, u_i) below the target
// level this deflates them, so minimizing yields the next eigenvalue. All
// circuits must span the same register.
Objective make_projected_objective(
    const QubitHamiltonian& h, const QCircuit& u,
    const std::vector<std::pair<double, QCircuit>>& previous = {});

}  // namespace varqo
