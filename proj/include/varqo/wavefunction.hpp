#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "varqo/common.hpp"

namespace varqo {

// Sparse n-qubit state. Basis states are keyed by integer index; qubit 0 is
// the leftmost character of a bitstring and the most significant bit of the
// index, so "10" on two qubits is index 2.
class QubitWaveFunction {
 public:
  using AmplitudeMap = std::map<std::uint64_t, cxd>;

  QubitWaveFunction() = default;
  explicit QubitWaveFunction(unsigned n_qubits) : n_qubits_(n_qubits) {}

  static QubitWaveFunction basis_state(unsigned n_qubits, std::uint64_t index);
  static QubitWaveFunction from_amplitudes(unsigned n_qubits, AmplitudeMap amps);

  // Grammar: term ("+"|"-" term)*, term = [complex coefficient] "|" bits ">".
  // Example: "1.0|00> + 1.0|11>". Auto-normalizes unless normalize=false.
  static QubitWaveFunction parse(const std::string& text, bool normalize = true);

  unsigned n_qubits() const { return n_qubits_; }
  const AmplitudeMap& amplitudes() const { return amps_; }
  bool empty() const { return amps_.empty(); }

  cxd amplitude(std::uint64_t index) const;
  cxd amplitude(const std::string& bits) const;

  double norm() const;
  QubitWaveFunction normalized() const;

  // <this|other>
  cxd inner(const QubitWaveFunction& other) const;

  std::string to_string() const;

  static std::string bits_of(std::uint64_t index, unsigned n_qubits);
  static std::uint64_t index_of(const std::string& bits);

 private:
  unsigned n_qubits_ = 0;
  AmplitudeMap amps_;
};

// Complex scalar in the operator/wavefunction text formats: "1.5", "-2i",
// "(1+0.5i)". Emits the shortest form that parses back exactly.
std::string format_complex(cxd v);

}  // namespace varqo
