#include "varqo/chemistry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace varqo {

namespace {

constexpr double kSymTol = 1e-8;

std::size_t g_index(unsigned n, unsigned p, unsigned q, unsigned r,
                    unsigned s) {
  return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
}

}  // namespace

double Molecule::one_body(unsigned p, unsigned q) const {
  return h[static_cast<std::size_t>(p) * n_orbitals + q];
}

double Molecule::two_body(unsigned p, unsigned q, unsigned r,
                          unsigned s) const {
  return g[g_index(n_orbitals, p, q, r, s)];
}

std::vector<unsigned> Molecule::occupied() const {
  if (!reference_occ.empty()) return reference_occ;
  std::vector<unsigned> occ(n_electrons / 2);
  for (unsigned i = 0; i < occ.size(); ++i) occ[i] = i;
  return occ;
}

void Molecule::validate() const {
  const std::size_t n = n_orbitals;
  if (n == 0) throw std::invalid_argument("molecule: no orbitals");
  if (h.size() != n * n)
    throw std::invalid_argument("molecule: one-body integrals are not n*n");
  if (g.size() != n * n * n * n)
    throw std::invalid_argument("molecule: two-body integrals are not n^4");
  if (n_electrons > 2 * n_orbitals)
    throw std::invalid_argument("molecule: more electrons than spin orbitals");

  for (unsigned p = 0; p < n; ++p)
    for (unsigned q = 0; q < p; ++q)
      if (std::abs(one_body(p, q) - one_body(q, p)) > kSymTol)
        throw std::invalid_argument("molecule: one-body integrals asymmetric");

  for (unsigned p = 0; p < n; ++p)
    for (unsigned q = 0; q < n; ++q)
      for (unsigned r = 0; r < n; ++r)
        for (unsigned s = 0; s < n; ++s) {
          const double v = two_body(p, q, r, s);
          if (std::abs(v - two_body(q, p, r, s)) > kSymTol ||
              std::abs(v - two_body(p, q, s, r)) > kSymTol ||
              std::abs(v - two_body(r, s, p, q)) > kSymTol)
            throw std::invalid_argument(
                "molecule: two-body integrals break the 8-fold symmetry");
        }

  if (active) {
    if (active->empty())
      throw std::invalid_argument("molecule: active space is empty");
    std::set<unsigned> seen;
    for (unsigned a : *active) {
      if (a >= n_orbitals)
        throw std::invalid_argument("molecule: active orbital out of range");
      if (!seen.insert(a).second)
        throw std::invalid_argument("molecule: duplicate active orbital");
    }
  }

  if (!reference_occ.empty()) {
    std::set<unsigned> seen;
    for (unsigned o : reference_occ) {
      if (o >= n_orbitals)
        throw std::invalid_argument("molecule: occupied orbital out of range");
      if (!seen.insert(o).second)
        throw std::invalid_argument("molecule: duplicate occupied orbital");
    }
    if (2 * reference_occ.size() != n_electrons)
      throw std::invalid_argument(
          "molecule: reference occupation does not match the electron count");
  }
}

Molecule Molecule::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Molecule m;
  m.n_orbitals = j.at("n_orbitals").get<unsigned>();
  m.n_electrons = j.at("n_electrons").get<unsigned>();
  m.e_nuc = j.at("e_nuc").get<double>();
  m.h = j.at("h").get<std::vector<double>>();
  m.g = j.at("g").get<std::vector<double>>();
  if (j.contains("active"))
    m.active = j.at("active").get<std::vector<unsigned>>();
  if (j.contains("reference_occ"))
    m.reference_occ = j.at("reference_occ").get<std::vector<unsigned>>();
  if (j.contains("geometry")) m.geometry = j.at("geometry").get<std::string>();
  m.validate();
  return m;
}

Molecule Molecule::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("molecule: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string Molecule::to_json() const {
  nlohmann::json j;
  j["n_orbitals"] = n_orbitals;
  j["n_electrons"] = n_electrons;
  j["e_nuc"] = e_nuc;
  j["h"] = h;
  j["g"] = g;
  if (active) j["active"] = *active;
  if (!reference_occ.empty()) j["reference_occ"] = reference_occ;
  if (!geometry.empty()) j["geometry"] = geometry;
  return j.dump(2);
}

FermionOperator FermionOperator::identity(cxd coeff) {
  return FermionOperator({FermionTerm{{}, coeff}});
}

FermionOperator FermionOperator::create(unsigned p) {
  return FermionOperator({FermionTerm{{{p, true}}, 1.0}});
}

FermionOperator FermionOperator::annihilate(unsigned p) {
  return FermionOperator({FermionTerm{{{p, false}}, 1.0}});
}

unsigned FermionOperator::n_modes() const {
  unsigned n = 0;
  for (const FermionTerm& t : terms_)
    for (const auto& [idx, dag] : t.ops) n = std::max(n, idx + 1);
  return n;
}

FermionOperator FermionOperator::adjoint() const {
  std::vector<FermionTerm> out;
  out.reserve(terms_.size());
  for (const FermionTerm& t : terms_) {
    FermionTerm a;
    a.coefficient = std::conj(t.coefficient);
    a.ops.assign(t.ops.rbegin(), t.ops.rend());
    for (auto& [idx, dag] : a.ops) dag = !dag;
    out.push_back(std::move(a));
  }
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::normal_ordered(double drop_tol) const {
  std::vector<FermionTerm> work = terms_, done;
  while (!work.empty()) {
    FermionTerm t = std::move(work.back());
    work.pop_back();

    bool rewritten = false;
    for (std::size_t i = 0; i + 1 < t.ops.size(); ++i) {
      const auto [p, pdag] = t.ops[i];
      const auto [q, qdag] = t.ops[i + 1];
      if (!pdag && qdag) {
        // a_p a^dag_q = delta_pq - a^dag_q a_p
        FermionTerm swapped = t;
        std::swap(swapped.ops[i], swapped.ops[i + 1]);
        swapped.coefficient = -t.coefficient;
        work.push_back(std::move(swapped));
        if (p == q) {
          FermionTerm contracted = t;
          contracted.ops.erase(contracted.ops.begin() + i,
                               contracted.ops.begin() + i + 2);
          work.push_back(std::move(contracted));
        }
        rewritten = true;
        break;
      }
      if (pdag == qdag && p <= q) {
        if (p == q) {  // nilpotent
          rewritten = true;
          break;
        }
        FermionTerm swapped = t;  // same species anticommute freely
        std::swap(swapped.ops[i], swapped.ops[i + 1]);
        swapped.coefficient = -t.coefficient;
        work.push_back(std::move(swapped));
        rewritten = true;
        break;
      }
    }
    if (!rewritten) done.push_back(std::move(t));
  }

  std::map<std::vector<std::pair<unsigned, bool>>, cxd> combined;
  for (FermionTerm& t : done) combined[t.ops] += t.coefficient;
  std::vector<FermionTerm> out;
  for (auto& [ops, coeff] : combined)
    if (std::abs(coeff) > drop_tol) out.push_back(FermionTerm{ops, coeff});
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::operator+(const FermionOperator& o) const {
  std::vector<FermionTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::operator-(const FermionOperator& o) const {
  return *this + (-o);
}

FermionOperator FermionOperator::operator*(const FermionOperator& o) const {
  std::vector<FermionTerm> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const FermionTerm& a : terms_)
    for (const FermionTerm& b : o.terms_) {
      FermionTerm p;
      p.coefficient = a.coefficient * b.coefficient;
      p.ops = a.ops;
      p.ops.insert(p.ops.end(), b.ops.begin(), b.ops.end());
      out.push_back(std::move(p));
    }
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::operator*(cxd scalar) const {
  std::vector<FermionTerm> out = terms_;
  for (FermionTerm& t : out) t.coefficient *= scalar;
  return FermionOperator(std::move(out));
}

namespace {

// 1/2 (X_p -+ i Y_p) Z_{p-1} ... Z_0; minus for creation.
QubitHamiltonian jw_ladder(unsigned p, bool dagger) {
  PauliString::FactorMap base;
  for (unsigned q = 0; q < p; ++q) base[q] = PauliAxis::Z;
  PauliString::FactorMap x = base, y = base;
  x[p] = PauliAxis::X;
  y[p] = PauliAxis::Y;
  QubitHamiltonian out;
  out = out + QubitHamiltonian(PauliString(std::move(x), 0.5));
  out = out + QubitHamiltonian(
                  PauliString(std::move(y), cxd(0.0, dagger ? -0.5 : 0.5)));
  return out;
}

}  // namespace

QubitHamiltonian jordan_wigner(const FermionOperator& f) {
  QubitHamiltonian out = QubitHamiltonian::zero();
  for (const FermionTerm& t : f.terms()) {
    QubitHamiltonian product = QubitHamiltonian::identity(t.coefficient);
    for (const auto& [idx, dag] : t.ops) product = product * jw_ladder(idx, dag);
    out = out + product;
  }
  return out.simplified();
}

Molecule fold_active(const Molecule& mol) {
  mol.validate();
  if (!mol.active) return mol;

  std::vector<unsigned> act = *mol.active;
  std::sort(act.begin(), act.end());
  const std::set<unsigned> act_set(act.begin(), act.end());

  std::vector<unsigned> frozen;
  for (unsigned o : mol.occupied())
    if (!act_set.count(o)) frozen.push_back(o);

  const unsigned remaining = mol.n_electrons - 2 * unsigned(frozen.size());
  if (remaining > 2 * act.size())
    throw std::invalid_argument(
        "fold_active: active space too small for the remaining electrons");

  const unsigned n = unsigned(act.size());
  Molecule out;
  out.n_orbitals = n;
  out.n_electrons = remaining;
  out.geometry = mol.geometry;
  out.h.assign(std::size_t(n) * n, 0.0);
  out.g.assign(std::size_t(n) * n * n * n, 0.0);

  double e_frozen = 0.0;
  for (unsigned i : frozen) e_frozen += 2.0 * mol.one_body(i, i);
  for (unsigned i : frozen)
    for (unsigned j : frozen)
      e_frozen += 2.0 * mol.two_body(i, i, j, j) - mol.two_body(i, j, j, i);
  out.e_nuc = mol.e_nuc + e_frozen;

  for (unsigned t = 0; t < n; ++t)
    for (unsigned u = 0; u < n; ++u) {
      double v = mol.one_body(act[t], act[u]);
      for (unsigned i : frozen)
        v += 2.0 * mol.two_body(act[t], act[u], i, i) -
             mol.two_body(act[t], i, i, act[u]);
      out.h[std::size_t(t) * n + u] = v;
    }

  for (unsigned t = 0; t < n; ++t)
    for (unsigned u = 0; u < n; ++u)
      for (unsigned v = 0; v < n; ++v)
        for (unsigned w = 0; w < n; ++w)
          out.g[g_index(n, t, u, v, w)] =
              mol.two_body(act[t], act[u], act[v], act[w]);

  for (unsigned o : mol.occupied())
    if (act_set.count(o))
      out.reference_occ.push_back(
          unsigned(std::lower_bound(act.begin(), act.end(), o) - act.begin()));

  out.validate();
  return out;
}

QubitHamiltonian make_hamiltonian(const Molecule& mol) {
  const Molecule m = fold_active(mol);  // validates; identity without active
  const unsigned n = m.n_orbitals;
  constexpr double tol = 1e-14;

  std::vector<FermionTerm> terms;
  for (unsigned p = 0; p < n; ++p)
    for (unsigned q = 0; q < n; ++q) {
      const double c = m.one_body(p, q);
      if (std::abs(c) < tol) continue;
      for (unsigned spin = 0; spin < 2; ++spin)
        terms.push_back(
            FermionTerm{{{2 * p + spin, true}, {2 * q + spin, false}}, c});
    }

  // Mulliken (pq|rs) couples the charge densities of transitions p->q and
  // r->s; in Dirac form <pr|qs> = (pq|rs), so
  //   1/2 sum (pq|rs) a^dag_ps a^dag_rt a_st a_qs  over spins s, t.
  for (unsigned p = 0; p < n; ++p)
    for (unsigned q = 0; q < n; ++q)
      for (unsigned r = 0; r < n; ++r)
        for (unsigned s = 0; s < n; ++s) {
          const double c = 0.5 * m.two_body(p, q, r, s);
          if (std::abs(c) < tol) continue;
          for (unsigned sp = 0; sp < 2; ++sp)
            for (unsigned tp = 0; tp < 2; ++tp)
              terms.push_back(FermionTerm{{{2 * p + sp, true},
                                           {2 * r + tp, true},
                                           {2 * s + tp, false},
                                           {2 * q + sp, false}},
                                          c});
        }

  QubitHamiltonian out = jordan_wigner(FermionOperator(std::move(terms)));
  if (std::abs(m.e_nuc) > 0.0)
    out = out + QubitHamiltonian::identity(m.e_nuc);
  return out.simplified();
}

QubitHamiltonian make_excitation_generator(const ExcitationIndices& indices) {
  if (indices.empty())
    throw std::invalid_argument("excitation: empty index list");
  std::set<unsigned> seen;
  for (const auto& [p, q] : indices) {
    if (!seen.insert(p).second || !seen.insert(q).second)
      throw std::invalid_argument("excitation: repeated spin orbital index");
  }

  FermionOperator product = FermionOperator::identity();
  for (const auto& [p, q] : indices)
    product = product * FermionOperator::create(p) *
              FermionOperator::annihilate(q);
  const FermionOperator gen =
      cxd(0.0, 1.0) * (product - product.adjoint());
  return jordan_wigner(gen);
}

QCircuit make_excitation_gate(const ExcitationIndices& indices, Expr angle) {
  // The generator's strings pairwise commute, so one Trotter step is exact.
  return gates::GeneralizedRotation(make_excitation_generator(indices),
                                    std::move(angle), 1);
}

QCircuit prepare_reference(const Molecule& mol) {
  QCircuit c;
  for (unsigned o : mol.occupied()) {
    c += gates::X(2 * o);
    c += gates::X(2 * o + 1);
  }
  return c;
}

QCircuit make_upccgsd_ansatz(const Molecule& mol, unsigned layers,
                             bool include_singles) {
  if (layers == 0)
    throw std::invalid_argument("upccgsd: layers must be positive");
  const Molecule m = fold_active(mol);
  const unsigned n = m.n_orbitals;
  if (n < 2)
    throw std::invalid_argument("upccgsd: needs at least 2 active orbitals");

  QCircuit c = prepare_reference(m);
  for (unsigned layer = 0; layer < layers; ++layer) {
    const std::string tag = std::to_string(layer);
    for (unsigned p = 0; p < n; ++p)
      for (unsigned q = p + 1; q < n; ++q) {
        const std::string pq =
            std::to_string(p) + "_" + std::to_string(q);
        const Variable d("D_" + pq, tag);
        c += make_excitation_gate({{2 * p, 2 * q}, {2 * p + 1, 2 * q + 1}},
                                  Expr(d));
        if (include_singles) {
          const Variable s("S_" + pq, tag);
          c += make_excitation_gate({{2 * p, 2 * q}}, Expr(s));
          c += make_excitation_gate({{2 * p + 1, 2 * q + 1}}, Expr(s));
        }
      }
  }
  return c;
}

Objective make_projected_objective(
    const QubitHamiltonian& h, const QCircuit& u,
    const std::vector<std::pair<double, QCircuit>>& previous) {
  Objective out = make_expectation(u, h);
  if (previous.empty()) return out;

  const unsigned n = std::max(u.n_qubits(), 1u);
  QubitHamiltonian zero_projector = paulis_qp(0);
  for (unsigned q = 1; q < n; ++q)
    zero_projector = zero_projector * paulis_qp(q);
  zero_projector = zero_projector.simplified();

  for (const auto& [energy, circuit] : previous) {
    if (circuit.n_qubits() != u.n_qubits())
      throw std::invalid_argument(
          "projected objective: circuits span different registers");
    const Objective overlap =
        make_expectation(u + circuit.dagger(), zero_projector);
    out = out - Objective(energy) * overlap;
  }
  return out;
}

}  // namespace varqo
