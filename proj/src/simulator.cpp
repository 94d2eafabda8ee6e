#include "varqo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace varqo {

using kernels::Mat2;
using kernels::Policy;

// --------------------------------------------------------------------------
// StateVector

StateVector::StateVector(unsigned n) : n_qubits(n) {
  amplitudes.assign(std::size_t{1} << n, cxd(0.0));
  amplitudes[0] = 1.0;
}

StateVector StateVector::from_wavefunction(const QubitWaveFunction& w,
                                           int n_qubits) {
  unsigned n = w.n_qubits();
  if (n_qubits >= 0) n = std::max(n, static_cast<unsigned>(n_qubits));
  n = std::max(n, 1u);
  StateVector sv(n);
  sv.amplitudes[0] = 0.0;
  // Qubit 0 is the most significant bit, so widening a register appends
  // fresh |0> qubits at the low end: old indices shift up.
  const unsigned shift = n - w.n_qubits();
  for (const auto& [idx, amp] : w.amplitudes())
    sv.amplitudes[idx << shift] = amp;
  return sv;
}

QubitWaveFunction StateVector::to_wavefunction(double drop_tol) const {
  QubitWaveFunction::AmplitudeMap amps;
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    if (std::abs(amplitudes[i]) > drop_tol) amps[i] = amplitudes[i];
  return QubitWaveFunction::from_amplitudes(n_qubits, std::move(amps));
}

double StateVector::norm_sqr() const {
  return kernels::norm_sqr_serial(amplitudes.data(), amplitudes.size());
}

// --------------------------------------------------------------------------
// Gate application

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint64_t bit_of(unsigned qubit, unsigned n) {
  return std::uint64_t(n - 1 - qubit);
}

std::uint64_t control_mask(const std::vector<unsigned>& controls, unsigned n) {
  std::uint64_t mask = 0;
  for (unsigned c : controls) mask |= std::uint64_t{1} << bit_of(c, n);
  return mask;
}

Mat2 power_matrix(GateTag base, double t) {
  // A^t = e^{i pi t/2} R_A(pi t), principal branch.
  const double half = kPi * t / 2.0;
  const cxd g = std::polar(1.0, half);
  const double c = std::cos(half);
  const double s = std::sin(half);
  switch (base) {
    case GateTag::X: return {g * c, g * cxd(0, -s), g * cxd(0, -s), g * c};
    case GateTag::Y: return {g * c, -g * s, g * s, g * c};
    case GateTag::Z:
      return {g * std::polar(1.0, -half), 0.0, 0.0, g * std::polar(1.0, half)};
    default:
      throw std::invalid_argument("Power base must be X, Y or Z");
  }
}

unsigned count_y(const PauliString& p) {
  unsigned n = 0;
  for (const auto& [q, axis] : p.factors())
    if (axis == PauliAxis::Y) ++n;
  return n;
}

void apply_exp_pauli_term(StateVector& sv, const PauliString& term,
                          double theta, std::uint64_t cmask, Policy policy) {
  const unsigned n = sv.n_qubits;
  kernels::apply_exp_pauli(policy, sv.amplitudes.data(), sv.dim(),
                           term.flip_mask(n), term.yz_mask(n), count_y(term),
                           std::cos(theta / 2.0), std::sin(theta / 2.0),
                           cmask);
}

void apply_gate(StateVector& sv, const Gate& g, const Assignment& vars,
                Policy policy) {
  const unsigned n = sv.n_qubits;
  const std::uint64_t cmask = control_mask(g.controls, n);
  auto angle = [&]() { return g.parameter->evaluate(vars); };
  auto one_q = [&](const Mat2& m) {
    kernels::apply_1q(policy, sv.amplitudes.data(), sv.dim(),
                      static_cast<unsigned>(bit_of(g.targets[0], n)), cmask,
                      m);
  };

  switch (g.tag) {
    case GateTag::X: one_q({0.0, 1.0, 1.0, 0.0}); return;
    case GateTag::Y: one_q({0.0, cxd(0, -1), cxd(0, 1), 0.0}); return;
    case GateTag::Z: one_q({1.0, 0.0, 0.0, -1.0}); return;
    case GateTag::H:
      one_q({kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2});
      return;
    case GateTag::S: one_q({1.0, 0.0, 0.0, cxd(0, 1)}); return;
    case GateTag::T:
      one_q({1.0, 0.0, 0.0, std::polar(1.0, kPi / 4)});
      return;
    case GateTag::Rx: {
      const double h = angle() / 2.0;
      const cxd ms(0, -std::sin(h));
      one_q({std::cos(h), ms, ms, std::cos(h)});
      return;
    }
    case GateTag::Ry: {
      const double h = angle() / 2.0;
      one_q({std::cos(h), -std::sin(h), std::sin(h), std::cos(h)});
      return;
    }
    case GateTag::Rz: {
      const double h = angle() / 2.0;
      one_q({std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h)});
      return;
    }
    case GateTag::Phase:
      one_q({1.0, 0.0, 0.0, std::polar(1.0, angle())});
      return;
    case GateTag::Power: one_q(power_matrix(g.power_base, angle())); return;
    case GateTag::SWAP:
      kernels::apply_swap(policy, sv.amplitudes.data(), sv.dim(),
                          static_cast<unsigned>(bit_of(g.targets[0], n)),
                          static_cast<unsigned>(bit_of(g.targets[1], n)),
                          cmask);
      return;
    case GateTag::ExpPauli:
      apply_exp_pauli_term(sv, g.generator->terms()[0], angle(), cmask,
                           policy);
      return;
    case GateTag::GeneralizedRotation: {
      const double theta = angle();
      const double steps = static_cast<double>(g.trotter_steps);
      for (unsigned s = 0; s < g.trotter_steps; ++s)
        for (const PauliString& term : g.generator->terms()) {
          const double c = term.coefficient().real();
          if (c == 0.0) continue;
          apply_exp_pauli_term(sv, term.with_coefficient(1.0),
                               theta * c / steps, cmask, policy);
        }
      return;
    }
  }
  throw std::logic_error("unhandled gate tag");
}

unsigned register_width(const QCircuit& circuit, const StateVector* initial) {
  unsigned n = std::max(circuit.n_qubits(), 1u);
  if (initial) n = std::max(n, initial->n_qubits);
  return n;
}

void check_qubit_limit(unsigned n, const SimulatorOptions& options) {
  if (n > options.qubit_limit)
    throw std::runtime_error(detail::str(
        "circuit needs ", n, " qubits, above the configured limit of ",
        options.qubit_limit));
}

}  // namespace

StateVector simulate(const QCircuit& circuit, const Assignment& vars,
                     const StateVector* initial,
                     const SimulatorOptions& options) {
  const unsigned n = register_width(circuit, initial);
  check_qubit_limit(n, options);
  StateVector sv(n);
  if (initial) {
    const unsigned shift = n - initial->n_qubits;
    sv.amplitudes.assign(sv.dim(), cxd(0.0));
    for (std::size_t i = 0; i < initial->amplitudes.size(); ++i)
      sv.amplitudes[i << shift] = initial->amplitudes[i];
  }
  for (const Gate& g : circuit.gates()) apply_gate(sv, g, vars, options.policy);
  return sv;
}

StateVector simulate(const QCircuit& circuit, const Assignment& vars,
                     const QubitWaveFunction& initial,
                     const SimulatorOptions& options) {
  StateVector init = StateVector::from_wavefunction(initial);
  return simulate(circuit, vars, &init, options);
}

// --------------------------------------------------------------------------
// Noise

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::BitFlip: return "bit_flip";
    case NoiseKind::PhaseFlip: return "phase_flip";
    case NoiseKind::AmplitudeDamp: return "amplitude_damp";
    case NoiseKind::PhaseDamp: return "phase_damp";
    case NoiseKind::AmplitudePhaseDamp: return "amplitude_phase_damp";
    case NoiseKind::Depolarizing: return "depolarizing";
  }
  return "?";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "bit_flip") return NoiseKind::BitFlip;
  if (name == "phase_flip") return NoiseKind::PhaseFlip;
  if (name == "amplitude_damp") return NoiseKind::AmplitudeDamp;
  if (name == "phase_damp") return NoiseKind::PhaseDamp;
  if (name == "amplitude_phase_damp") return NoiseKind::AmplitudePhaseDamp;
  if (name == "depolarizing") return NoiseKind::Depolarizing;
  throw std::invalid_argument(detail::str("unknown noise kind '", name, "'"));
}

QuantumNoise QuantumNoise::bit_flip(double p, unsigned level) {
  QuantumNoise n{NoiseKind::BitFlip, {p}, level};
  n.validate();
  return n;
}
QuantumNoise QuantumNoise::phase_flip(double p, unsigned level) {
  QuantumNoise n{NoiseKind::PhaseFlip, {p}, level};
  n.validate();
  return n;
}
QuantumNoise QuantumNoise::amplitude_damp(double gamma, unsigned level) {
  QuantumNoise n{NoiseKind::AmplitudeDamp, {gamma}, level};
  n.validate();
  return n;
}
QuantumNoise QuantumNoise::phase_damp(double gamma, unsigned level) {
  QuantumNoise n{NoiseKind::PhaseDamp, {gamma}, level};
  n.validate();
  return n;
}
QuantumNoise QuantumNoise::amplitude_phase_damp(double gamma_amplitude,
                                                double gamma_phase,
                                                unsigned level) {
  QuantumNoise n{NoiseKind::AmplitudePhaseDamp,
                 {gamma_amplitude, gamma_phase},
                 level};
  n.validate();
  return n;
}
QuantumNoise QuantumNoise::depolarizing(double p, unsigned level) {
  QuantumNoise n{NoiseKind::Depolarizing, {p}, level};
  n.validate();
  return n;
}

void QuantumNoise::validate() const {
  const std::size_t want = kind == NoiseKind::AmplitudePhaseDamp ? 2 : 1;
  if (probabilities.size() != want)
    throw std::invalid_argument(detail::str(noise_kind_name(kind), " takes ",
                                            want, " probability value(s)"));
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument(detail::str(
          "noise probability ", p, " outside [0, 1]"));
  if (level < 1) throw std::invalid_argument("noise level must be >= 1");
}

NoiseModel NoiseModel::operator+(const NoiseModel& o) const {
  NoiseModel out = *this;
  out.noises.insert(out.noises.end(), o.noises.begin(), o.noises.end());
  return out;
}

NoiseModel& NoiseModel::operator+=(const QuantumNoise& n) {
  n.validate();
  noises.push_back(n);
  return *this;
}

NoiseModel NoiseModel::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_array())
    throw std::invalid_argument("noise model JSON must be an array");
  NoiseModel model;
  for (const auto& entry : j) {
    QuantumNoise n;
    n.kind = noise_kind_from_name(entry.at("kind").get<std::string>());
    const auto& p = entry.contains("p") ? entry.at("p") : entry.at("probability");
    if (p.is_array())
      n.probabilities = p.get<std::vector<double>>();
    else
      n.probabilities = {p.get<double>()};
    n.level = entry.value("level", 1u);
    n.validate();
    model.noises.push_back(std::move(n));
  }
  return model;
}

std::string NoiseModel::to_json_text() const {
  nlohmann::json j = nlohmann::json::array();
  for (const QuantumNoise& n : noises) {
    nlohmann::json e;
    e["kind"] = noise_kind_name(n.kind);
    if (n.probabilities.size() == 1)
      e["p"] = n.probabilities[0];
    else
      e["p"] = n.probabilities;
    e["level"] = n.level;
    j.push_back(std::move(e));
  }
  return j.dump();
}

// --------------------------------------------------------------------------
// RNG plumbing

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xd1342543de82ef95ull);
  std::uint64_t out = splitmix64(state);
  return out ^ splitmix64(state);
}

double uniform01(std::uint64_t random_bits) {
  return static_cast<double>(random_bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Sampling

namespace {

void apply_unitary_branch(StateVector& sv, unsigned bit, const Mat2& m) {
  kernels::apply_1q_serial(sv.amplitudes.data(), sv.dim(), bit, 0, m);
}

// One Kraus draw of a 1-qubit channel on `qubit`; branch probabilities come
// from the current state, the chosen branch is applied renormalized.
void apply_channel(StateVector& sv, unsigned qubit, const QuantumNoise& noise,
                   std::mt19937_64& rng) {
  const unsigned bit = static_cast<unsigned>(bit_of(qubit, sv.n_qubits));
  const double u = detail::uniform01(rng());
  switch (noise.kind) {
    case NoiseKind::BitFlip: {
      if (u < noise.probabilities[0])
        apply_unitary_branch(sv, bit, {0.0, 1.0, 1.0, 0.0});
      return;
    }
    case NoiseKind::PhaseFlip: {
      if (u < noise.probabilities[0])
        apply_unitary_branch(sv, bit, {1.0, 0.0, 0.0, -1.0});
      return;
    }
    case NoiseKind::Depolarizing: {
      const double p = noise.probabilities[0];
      if (u < p / 3)
        apply_unitary_branch(sv, bit, {0.0, 1.0, 1.0, 0.0});
      else if (u < 2 * p / 3)
        apply_unitary_branch(sv, bit, {0.0, cxd(0, -1), cxd(0, 1), 0.0});
      else if (u < p)
        apply_unitary_branch(sv, bit, {1.0, 0.0, 0.0, -1.0});
      return;
    }
    case NoiseKind::AmplitudeDamp:
    case NoiseKind::PhaseDamp: {
      const double gamma = noise.probabilities[0];
      const double p_one =
          kernels::prob_bit_one_serial(sv.amplitudes.data(), sv.dim(), bit);
      const double p1 = gamma * p_one;
      if (u < p1) {
        const double r = std::sqrt(gamma) / std::sqrt(p1);
        if (noise.kind == NoiseKind::AmplitudeDamp)
          apply_unitary_branch(sv, bit, {0.0, r, 0.0, 0.0});
        else
          apply_unitary_branch(sv, bit, {0.0, 0.0, 0.0, r});
      } else {
        const double r = 1.0 / std::sqrt(1.0 - p1);
        apply_unitary_branch(sv, bit,
                             {r, 0.0, 0.0, std::sqrt(1.0 - gamma) * r});
      }
      return;
    }
    case NoiseKind::AmplitudePhaseDamp: {
      QuantumNoise amp{NoiseKind::AmplitudeDamp, {noise.probabilities[0]}, 1};
      QuantumNoise ph{NoiseKind::PhaseDamp, {noise.probabilities[1]}, 1};
      // u was drawn but unused; the sub-channels draw their own.
      apply_channel(sv, qubit, amp, rng);
      apply_channel(sv, qubit, ph, rng);
      return;
    }
  }
}

std::vector<unsigned> touched_qubits(const Gate& g) {
  std::set<unsigned> qs(g.targets.begin(), g.targets.end());
  qs.insert(g.controls.begin(), g.controls.end());
  return {qs.begin(), qs.end()};
}

std::uint64_t draw_index(const StateVector& sv, double u) {
  double acc = 0.0;
  const std::size_t dim = sv.dim();
  for (std::size_t i = 0; i < dim; ++i) {
    acc += std::norm(sv.amplitudes[i]);
    if (u < acc) return i;
  }
  return dim - 1;
}

}  // namespace

void SampleResult::add(const std::string& bits, std::uint64_t n) {
  counts[bits] += n;
  total += n;
}

std::string SampleResult::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [bits, n] : counts) {
    if (!first) out << ", ";
    out << bits << ": " << n;
    first = false;
  }
  return out.str();
}

SampleResult sample(const QCircuit& circuit, const Assignment& vars,
                    std::uint64_t samples, std::uint64_t seed,
                    const NoiseModel* noise, const SimulatorOptions& options) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const unsigned n = register_width(circuit, nullptr);
  check_qubit_limit(n, options);
  SampleResult result;

  if (!noise || noise->empty()) {
    StateVector sv = simulate(circuit, vars, nullptr, options);
    std::vector<double> cumulative(sv.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < sv.dim(); ++i) {
      acc += std::norm(sv.amplitudes[i]);
      cumulative[i] = acc;
    }
    std::mt19937_64 rng(detail::mix_seed(seed, 0));
    for (std::uint64_t s = 0; s < samples; ++s) {
      const double u = detail::uniform01(rng()) * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
      if (idx >= sv.dim()) idx = sv.dim() - 1;
      result.add(QubitWaveFunction::bits_of(idx, n));
    }
    return result;
  }

  for (const QuantumNoise& ch : noise->noises) ch.validate();
  // Trajectories run on serial kernels only: the per-shot Kraus draws then
  // depend on nothing but (seed, shot index).
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::mt19937_64 rng(detail::mix_seed(seed, s + 1));
    StateVector sv(n);
    for (const Gate& g : circuit.gates()) {
      apply_gate(sv, g, vars, Policy::Serial);
      const std::vector<unsigned> touched = touched_qubits(g);
      for (const QuantumNoise& ch : noise->noises)
        if (ch.level == touched.size())
          for (unsigned q : touched) apply_channel(sv, q, ch, rng);
    }
    const std::uint64_t idx = draw_index(sv, detail::uniform01(rng()));
    result.add(QubitWaveFunction::bits_of(idx, n));
  }
  return result;
}

// --------------------------------------------------------------------------
// Expectation values

double expectation(const StateVector& state, const QubitHamiltonian& h,
                   kernels::Policy policy) {
  if (h.n_qubits() > state.n_qubits)
    throw std::invalid_argument(
        "Hamiltonian acts on more qubits than the state");
  const unsigned n = state.n_qubits;
  cxd acc = 0.0;
  for (const PauliString& term : h.terms())
    acc += term.coefficient() *
           kernels::pauli_inner(policy, state.amplitudes.data(), state.dim(),
                                term.flip_mask(n), term.yz_mask(n),
                                count_y(term));
  if (std::abs(acc.imag()) > 1e-8)
    throw std::invalid_argument(detail::str(
        "expectation value has imaginary part ", acc.imag(),
        "; the operator is not Hermitian"));
  return acc.real();
}

double expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                   const Assignment& vars, const SimulatorOptions& options) {
  const unsigned n =
      std::max({circuit.n_qubits(), h.n_qubits(), 1u});
  check_qubit_limit(n, options);
  StateVector init(n);
  StateVector sv = simulate(circuit, vars, &init, options);
  return expectation(sv, h, options.policy);
}

}  // namespace varqo
