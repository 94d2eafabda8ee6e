#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "varqo/circuit.hpp"
#include "varqo/kernels.hpp"
#include "varqo/wavefunction.hpp"

namespace varqo {

// Dense 2^n amplitude array; index bit n-1-q carries qubit q (same bit order
// as QubitWaveFunction).
struct StateVector {
  unsigned n_qubits = 0;
  std::vector<cxd> amplitudes;

  StateVector() = default;
  explicit StateVector(unsigned n);  // |0...0>
  static StateVector from_wavefunction(const QubitWaveFunction& w,
                                       int n_qubits = -1);
  QubitWaveFunction to_wavefunction(double drop_tol = 1e-12) const;

  std::size_t dim() const { return amplitudes.size(); }
  double norm_sqr() const;
};

enum class NoiseKind {
  BitFlip,
  PhaseFlip,
  AmplitudeDamp,
  PhaseDamp,
  AmplitudePhaseDamp,
  Depolarizing,
};

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// One noise channel. `level` is the gate arity it attaches to: after every
// gate touching exactly `level` qubits (targets plus controls), the channel
// is applied independently to each touched qubit, in ascending qubit order.
struct QuantumNoise {
  NoiseKind kind;
  std::vector<double> probabilities;  // one entry; two for AmplitudePhaseDamp
  unsigned level = 1;

  static QuantumNoise bit_flip(double p, unsigned level = 1);
  static QuantumNoise phase_flip(double p, unsigned level = 1);
  static QuantumNoise amplitude_damp(double gamma, unsigned level = 1);
  static QuantumNoise phase_damp(double gamma, unsigned level = 1);
  static QuantumNoise amplitude_phase_damp(double gamma_amplitude,
                                           double gamma_phase,
                                           unsigned level = 1);
  static QuantumNoise depolarizing(double p, unsigned level = 1);

  void validate() const;
};

struct NoiseModel {
  std::vector<QuantumNoise> noises;

  bool empty() const { return noises.empty(); }
  NoiseModel operator+(const NoiseModel& o) const;
  NoiseModel& operator+=(const QuantumNoise& n);

  // JSON: [{"kind": "bit_flip", "p": 0.05, "level": 1}, ...]; p is a number
  // or, for amplitude_phase_damp, a two-element array.
  static NoiseModel from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct SampleResult {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string& bits, std::uint64_t n = 1);
  std::string to_string() const;
};

struct SimulatorOptions {
  kernels::Policy policy = kernels::Policy::Auto;
  unsigned qubit_limit = 24;
};

// Exact statevector execution. All circuit variables must be assigned;
// controls are applied natively via amplitude masking.
StateVector simulate(const QCircuit& circuit, const Assignment& vars = {},
                     const StateVector* initial = nullptr,
                     const SimulatorOptions& options = {});
StateVector simulate(const QCircuit& circuit, const Assignment& vars,
                     const QubitWaveFunction& initial,
                     const SimulatorOptions& options = {});

// Computational-basis draws from |amplitudes|^2. With a noise model, each
// shot runs its own Kraus-branch trajectory (forced onto serial kernels so
// results depend only on the seed). Bitstring keys put qubit 0 leftmost.
SampleResult sample(const QCircuit& circuit, const Assignment& vars,
                    std::uint64_t samples, std::uint64_t seed = 0,
                    const NoiseModel* noise = nullptr,
                    const SimulatorOptions& options = {});

// Re<psi|H|psi>, exact. Throws if the imaginary part exceeds 1e-8 (the
// Hamiltonian is then not Hermitian). Noise is rejected here: channels only
// make sense when sampling.
double expectation(const QCircuit& circuit, const QubitHamiltonian& h,
                   const Assignment& vars = {},
                   const SimulatorOptions& options = {});
double expectation(const StateVector& state, const QubitHamiltonian& h,
                   kernels::Policy policy = kernels::Policy::Auto);

namespace detail {
// SplitMix64 step; used to derive independent per-shot RNG streams.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
// Uniform double in [0, 1) from 53 random bits; independent of library
// distribution implementations.
double uniform01(std::uint64_t random_bits);
}  // namespace detail

}  // namespace varqo
