#include "varqo/pauli.hpp"

#include <cmath>

#include "parse_util.hpp"

namespace varqo {

char axis_char(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return 'X';
    case PauliAxis::Y: return 'Y';
    case PauliAxis::Z: return 'Z';
  }
  return '?';
}

PauliString PauliString::single(PauliAxis axis, unsigned qubit, cxd coeff) {
  return {FactorMap{{qubit, axis}}, coeff};
}

PauliString PauliString::operator*(const PauliString& o) const {
  FactorMap out = factors_;
  cxd phase = 1.0;
  for (const auto& [q, b] : o.factors_) {
    auto it = out.find(q);
    if (it == out.end()) {
      out.emplace(q, b);
      continue;
    }
    PauliAxis a = it->second;
    if (a == b) {
      out.erase(it);  // squares to identity
      continue;
    }
    int ai = static_cast<int>(a), bi = static_cast<int>(b);
    it->second = static_cast<PauliAxis>(6 - ai - bi);
    bool cyclic = (bi - ai + 3) % 3 == 1;  // XY, YZ, ZX pick up +i
    phase *= cyclic ? cxd(0.0, 1.0) : cxd(0.0, -1.0);
  }
  return {std::move(out), coeff_ * o.coeff_ * phase};
}

std::uint64_t PauliString::flip_mask(unsigned n_qubits) const {
  std::uint64_t m = 0;
  for (const auto& [q, a] : factors_)
    if (a != PauliAxis::Z) m |= std::uint64_t{1} << (n_qubits - 1 - q);
  return m;
}

std::uint64_t PauliString::yz_mask(unsigned n_qubits) const {
  std::uint64_t m = 0;
  for (const auto& [q, a] : factors_)
    if (a != PauliAxis::X) m |= std::uint64_t{1} << (n_qubits - 1 - q);
  return m;
}

cxd PauliString::basis_phase(std::uint64_t basis_index,
                             unsigned n_qubits) const {
  unsigned n_y = 0;
  bool sign = false;
  for (const auto& [q, a] : factors_) {
    bool bit = basis_index >> (n_qubits - 1 - q) & 1;
    if (a == PauliAxis::Y) ++n_y;
    if (a != PauliAxis::X && bit) sign = !sign;
  }
  static const cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
  cxd ph = i_pow[n_y % 4] * coeff_;
  return sign ? -ph : ph;
}

std::string PauliString::to_string() const {
  std::string out = format_complex(coeff_);
  for (const auto& [q, a] : factors_)
    out += detail::str("*", axis_char(a), "(", q, ")");
  return out;
}

unsigned QubitHamiltonian::n_qubits() const {
  unsigned n = 0;
  for (const auto& t : terms_) n = std::max(n, t.n_qubits());
  return n;
}

QubitHamiltonian QubitHamiltonian::simplified(double drop_tol) const {
  std::map<PauliString::FactorMap, std::size_t> first_slot;
  std::vector<PauliString::FactorMap> order;
  std::vector<cxd> sums;
  for (const auto& t : terms_) {
    auto [it, inserted] = first_slot.try_emplace(t.factors(), order.size());
    if (inserted) {
      order.push_back(t.factors());
      sums.push_back(t.coefficient());
    } else {
      sums[it->second] += t.coefficient();
    }
  }
  std::vector<PauliString> out;
  out.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    if (std::abs(sums[i]) >= drop_tol)
      out.emplace_back(std::move(order[i]), sums[i]);
  return QubitHamiltonian(std::move(out));
}

bool QubitHamiltonian::is_hermitian(double tol) const {
  const QubitHamiltonian s = simplified();
  for (const auto& t : s.terms())
    if (std::abs(t.coefficient().imag()) > tol) return false;
  return true;
}

QubitHamiltonian QubitHamiltonian::dagger() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_)
    out.push_back(t.with_coefficient(std::conj(t.coefficient())));
  return QubitHamiltonian(std::move(out));
}

std::pair<QubitHamiltonian, QubitHamiltonian> QubitHamiltonian::split(
    double drop_tol) const {
  std::vector<PauliString> herm, anti;
  const QubitHamiltonian s = simplified(drop_tol);
  for (const auto& t : s.terms()) {
    cxd c = t.coefficient();
    if (std::abs(c.real()) >= drop_tol)
      herm.push_back(t.with_coefficient(cxd(c.real(), 0.0)));
    if (std::abs(c.imag()) >= drop_tol)
      anti.push_back(t.with_coefficient(cxd(0.0, c.imag())));
  }
  return {QubitHamiltonian(std::move(herm)), QubitHamiltonian(std::move(anti))};
}

QubitHamiltonian QubitHamiltonian::operator+(const QubitHamiltonian& o) const {
  std::vector<PauliString> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return QubitHamiltonian(std::move(all)).simplified();
}

QubitHamiltonian QubitHamiltonian::operator-(const QubitHamiltonian& o) const {
  return *this + (-o);
}

QubitHamiltonian QubitHamiltonian::operator*(const QubitHamiltonian& o) const {
  std::vector<PauliString> all;
  all.reserve(terms_.size() * o.terms_.size());
  for (const auto& ta : terms_)
    for (const auto& tb : o.terms_) all.push_back(ta * tb);
  return QubitHamiltonian(std::move(all)).simplified();
}

QubitHamiltonian QubitHamiltonian::operator*(cxd scalar) const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_)
    out.push_back(t.with_coefficient(t.coefficient() * scalar));
  return QubitHamiltonian(std::move(out)).simplified();
}

QubitHamiltonian QubitHamiltonian::operator-() const { return *this * cxd(-1.0); }

std::string QubitHamiltonian::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    cxd c = t.coefficient();
    bool negative = (c.imag() == 0.0 && c.real() < 0.0) ||
                    (c.real() == 0.0 && c.imag() < 0.0);
    if (negative) c = -c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    out += t.with_coefficient(c).to_string();
    first = false;
  }
  return out;
}

QubitHamiltonian QubitHamiltonian::parse(const std::string& text) {
  detail::Cursor cur(text);
  std::vector<PauliString> terms;
  bool first = true;
  while (true) {
    cur.skip_ws();
    if (cur.eof()) {
      if (first) cur.fail("empty operator text");
      break;
    }
    double sign = 1.0;
    if (cur.consume('-'))
      sign = -1.0;
    else if (!first && !cur.consume('+'))
      cur.fail("expected '+' or '-' between terms");
    else
      cur.consume('+');
    cur.skip_ws();

    std::optional<cxd> coeff = cur.try_parse_coefficient();
    cur.skip_ws();
    if (coeff) cur.consume('*');

    PauliString::FactorMap factors;
    bool any_factor = false;
    while (true) {
      cur.skip_ws();
      char c = cur.peek();
      PauliAxis axis{};
      bool identity = false;
      if (c == 'X') axis = PauliAxis::X;
      else if (c == 'Y') axis = PauliAxis::Y;
      else if (c == 'Z') axis = PauliAxis::Z;
      else if (c == 'I') identity = true;
      else break;
      ++cur.pos;
      cur.skip_ws();
      if (!cur.consume('(')) cur.fail("expected '(' after Pauli letter");
      unsigned q = cur.parse_uint();
      cur.skip_ws();
      if (!cur.consume(')')) cur.fail("expected ')'");
      if (!identity) {
        if (!factors.emplace(q, axis).second)
          cur.fail(detail::str("duplicate qubit ", q, " within one term"));
      }
      any_factor = true;
      cur.skip_ws();
      cur.consume('*');
    }
    if (!coeff && !any_factor)
      cur.fail("expected a coefficient or Pauli factors");
    terms.emplace_back(std::move(factors), sign * coeff.value_or(cxd(1.0, 0.0)));
    first = false;
  }
  return QubitHamiltonian(std::move(terms)).simplified();
}

QubitHamiltonian paulis_qp(unsigned qubit) {
  return QubitHamiltonian(std::vector<PauliString>{
      PauliString(cxd(0.5, 0.0)),
      PauliString::single(PauliAxis::Z, qubit, cxd(0.5, 0.0))});
}

QubitHamiltonian paulis_qm(unsigned qubit) {
  return QubitHamiltonian(std::vector<PauliString>{
      PauliString(cxd(0.5, 0.0)),
      PauliString::single(PauliAxis::Z, qubit, cxd(-0.5, 0.0))});
}

QubitHamiltonian paulis_sp(unsigned qubit) {
  return QubitHamiltonian(std::vector<PauliString>{
      PauliString::single(PauliAxis::X, qubit, cxd(0.5, 0.0)),
      PauliString::single(PauliAxis::Y, qubit, cxd(0.0, 0.5))});
}

QubitHamiltonian paulis_sm(unsigned qubit) {
  return QubitHamiltonian(std::vector<PauliString>{
      PauliString::single(PauliAxis::X, qubit, cxd(0.5, 0.0)),
      PauliString::single(PauliAxis::Y, qubit, cxd(0.0, -0.5))});
}

QubitHamiltonian heisenberg(unsigned n_qubits, double jx, double jy, double jz,
                            double h, bool periodic) {
  if (n_qubits < 2)
    throw std::invalid_argument("heisenberg model needs at least 2 qubits");
  std::vector<PauliString> terms;
  unsigned bonds = periodic ? n_qubits : n_qubits - 1;
  for (unsigned k = 0; k < bonds; ++k) {
    unsigned l = (k + 1) % n_qubits;
    const std::pair<PauliAxis, double> couplings[] = {
        {PauliAxis::X, jx}, {PauliAxis::Y, jy}, {PauliAxis::Z, jz}};
    for (auto [axis, j] : couplings) {
      if (j == 0.0) continue;
      terms.push_back(PauliString::single(axis, k, j) *
                      PauliString::single(axis, l));
    }
  }
  if (h != 0.0)
    for (unsigned k = 0; k < n_qubits; ++k)
      terms.push_back(PauliString::single(PauliAxis::Z, k, h));
  return QubitHamiltonian(std::move(terms)).simplified();
}

namespace {

// |i><j| over n qubits as a product of Q±/σ± factors.
QubitHamiltonian dyad(std::uint64_t i, std::uint64_t j, unsigned n) {
  QubitHamiltonian r = QubitHamiltonian::identity(1.0);
  for (unsigned q = 0; q < n; ++q) {
    bool bi = i >> (n - 1 - q) & 1;
    bool bj = j >> (n - 1 - q) & 1;
    const QubitHamiltonian factor = bi ? (bj ? paulis_qm(q) : paulis_sm(q))
                                       : (bj ? paulis_sp(q) : paulis_qp(q));
    r = r * factor;
  }
  return r;
}

}  // namespace

QubitHamiltonian ketbra(const QubitWaveFunction& ket,
                        const QubitWaveFunction& bra,
                        bool allow_unnormalized) {
  if (ket.empty() || bra.empty())
    throw std::invalid_argument("ketbra of an empty wavefunction");
  if (ket.n_qubits() != bra.n_qubits())
    throw std::invalid_argument("ketbra qubit-count mismatch");
  if (!allow_unnormalized) {
    if (std::abs(ket.norm() - 1.0) > 1e-8 || std::abs(bra.norm() - 1.0) > 1e-8)
      throw std::invalid_argument(
          "ketbra inputs must be normalized (or pass allow_unnormalized)");
  }
  unsigned n = ket.n_qubits();
  std::vector<PauliString> terms;
  for (const auto& [i, ai] : ket.amplitudes())
    for (const auto& [j, aj] : bra.amplitudes()) {
      QubitHamiltonian d = dyad(i, j, n) * (ai * std::conj(aj));
      const auto& ts = d.terms();
      terms.insert(terms.end(), ts.begin(), ts.end());
    }
  return QubitHamiltonian(std::move(terms)).simplified();
}

QubitHamiltonian projector(const QubitWaveFunction& w) {
  if (w.empty()) throw std::invalid_argument("projector of an empty wavefunction");
  QubitWaveFunction n = w.normalized();
  return ketbra(n, n);
}

QubitHamiltonian matrix_to_operator(const DenseMatrix& m) {
  if (m.rows == 0 || m.cols == 0)
    throw std::invalid_argument("matrix_to_operator requires nonzero dimensions");
  std::size_t longest = std::max(m.rows, m.cols);
  unsigned n = 0;
  while ((std::size_t{1} << n) < longest) ++n;
  std::vector<PauliString> terms;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j) == cxd{}) continue;
      QubitHamiltonian d = dyad(i, j, n) * m(i, j);
      const auto& ts = d.terms();
      terms.insert(terms.end(), ts.begin(), ts.end());
    }
  return QubitHamiltonian(std::move(terms)).simplified();
}

DenseMatrix to_matrix(const QubitHamiltonian& h, int n_qubits,
                      unsigned dense_limit) {
  unsigned n = n_qubits < 0 ? h.n_qubits() : static_cast<unsigned>(n_qubits);
  n = std::max(n, h.n_qubits());
  if (n > dense_limit)
    throw std::invalid_argument(detail::str(
        "dense realization of ", n, " qubits exceeds the limit of ",
        dense_limit));
  n = std::max(n, 1u);
  std::uint64_t dim = std::uint64_t{1} << n;
  DenseMatrix m(dim, dim);
  for (const auto& t : h.terms()) {
    std::uint64_t flip = t.flip_mask(n);
    for (std::uint64_t b = 0; b < dim; ++b)
      m(b ^ flip, b) += t.basis_phase(b, n);
  }
  return m;
}

BinarySymplectic to_symplectic(const QubitHamiltonian& h, int n_qubits) {
  unsigned n = n_qubits < 0 ? h.n_qubits() : static_cast<unsigned>(n_qubits);
  n = std::max(n, h.n_qubits());
  BinarySymplectic b;
  b.n_qubits = n;
  for (const auto& t : h.terms()) {
    std::vector<bool> x(n, false), z(n, false);
    for (const auto& [q, a] : t.factors()) {
      if (a != PauliAxis::Z) x[q] = true;
      if (a != PauliAxis::X) z[q] = true;
    }
    b.x_bits.push_back(std::move(x));
    b.z_bits.push_back(std::move(z));
    b.coefficients.push_back(t.coefficient());
  }
  return b;
}

QubitHamiltonian from_symplectic(const BinarySymplectic& b) {
  if (b.x_bits.size() != b.z_bits.size() ||
      b.x_bits.size() != b.coefficients.size())
    throw std::invalid_argument("symplectic term-count mismatch");
  std::vector<PauliString> terms;
  for (std::size_t t = 0; t < b.x_bits.size(); ++t) {
    if (b.x_bits[t].size() != b.n_qubits || b.z_bits[t].size() != b.n_qubits)
      throw std::invalid_argument("symplectic bit-vector length mismatch");
    PauliString::FactorMap f;
    for (unsigned q = 0; q < b.n_qubits; ++q) {
      bool x = b.x_bits[t][q], z = b.z_bits[t][q];
      if (x && z) f.emplace(q, PauliAxis::Y);
      else if (x) f.emplace(q, PauliAxis::X);
      else if (z) f.emplace(q, PauliAxis::Z);
    }
    terms.emplace_back(std::move(f), b.coefficients[t]);
  }
  return QubitHamiltonian(std::move(terms));
}

bool approx_equal(const QubitHamiltonian& a, const QubitHamiltonian& b,
                  double tol) {
  std::map<PauliString::FactorMap, cxd> diff;
  for (const auto& t : a.terms()) diff[t.factors()] += t.coefficient();
  for (const auto& t : b.terms()) diff[t.factors()] -= t.coefficient();
  for (const auto& [f, c] : diff)
    if (std::abs(c) > tol) return false;
  return true;
}

}  // namespace varqo
