#include "varqo/wavefunction.hpp"

#include <cmath>

#include "parse_util.hpp"

namespace varqo {

std::string format_complex(cxd v) {
  double re = v.real() == 0.0 ? 0.0 : v.real();
  double im = v.imag() == 0.0 ? 0.0 : v.imag();
  if (im == 0.0) return format_double(re);
  if (re == 0.0) return format_double(im) + "i";
  return detail::str("(", format_double(re), im < 0 ? "-" : "+",
                     format_double(std::abs(im)), "i)");
}

QubitWaveFunction QubitWaveFunction::basis_state(unsigned n_qubits,
                                                 std::uint64_t index) {
  QubitWaveFunction w(n_qubits);
  if (n_qubits < 64 && index >= (std::uint64_t{1} << n_qubits))
    throw std::invalid_argument("basis index out of range");
  w.amps_[index] = 1.0;
  return w;
}

QubitWaveFunction QubitWaveFunction::from_amplitudes(unsigned n_qubits,
                                                     AmplitudeMap amps) {
  QubitWaveFunction w(n_qubits);
  for (auto& [idx, a] : amps) {
    if (n_qubits < 64 && idx >= (std::uint64_t{1} << n_qubits))
      throw std::invalid_argument("basis index out of range");
    if (a != cxd{}) w.amps_.emplace(idx, a);
  }
  return w;
}

QubitWaveFunction QubitWaveFunction::parse(const std::string& text,
                                           bool normalize) {
  detail::Cursor cur(text);
  AmplitudeMap amps;
  unsigned n_qubits = 0;
  bool first = true;
  bool have_width = false;
  while (true) {
    cur.skip_ws();
    if (cur.eof()) {
      if (first) cur.fail("empty wavefunction");
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
    cxd coeff = cur.try_parse_coefficient().value_or(cxd(1.0, 0.0));
    cur.skip_ws();
    cur.consume('*');
    cur.skip_ws();
    if (!cur.consume('|')) cur.fail("expected '|'");
    std::string bits;
    while (cur.peek() == '0' || cur.peek() == '1') bits.push_back(text[cur.pos++]);
    if (bits.empty()) cur.fail("expected a bitstring of 0s and 1s");
    if (!cur.consume('>')) cur.fail("expected '>'");
    if (!have_width) {
      n_qubits = static_cast<unsigned>(bits.size());
      have_width = true;
    } else if (bits.size() != n_qubits) {
      cur.fail("bitstrings must all have the same length");
    }
    amps[index_of(bits)] += sign * coeff;
    first = false;
  }
  QubitWaveFunction w = from_amplitudes(n_qubits, std::move(amps));
  if (normalize) w = w.normalized();
  return w;
}

cxd QubitWaveFunction::amplitude(std::uint64_t index) const {
  auto it = amps_.find(index);
  return it == amps_.end() ? cxd{} : it->second;
}

cxd QubitWaveFunction::amplitude(const std::string& bits) const {
  if (bits.size() != n_qubits_)
    throw std::invalid_argument("bitstring length does not match qubit count");
  return amplitude(index_of(bits));
}

double QubitWaveFunction::norm() const {
  double s = 0.0;
  for (const auto& [idx, a] : amps_) s += std::norm(a);
  return std::sqrt(s);
}

QubitWaveFunction QubitWaveFunction::normalized() const {
  double n = norm();
  if (n == 0.0)
    throw std::invalid_argument("cannot normalize a zero wavefunction");
  QubitWaveFunction w(n_qubits_);
  for (const auto& [idx, a] : amps_) w.amps_.emplace(idx, a / n);
  return w;
}

cxd QubitWaveFunction::inner(const QubitWaveFunction& other) const {
  if (n_qubits_ != other.n_qubits_)
    throw std::invalid_argument("inner product qubit-count mismatch");
  cxd s{};
  for (const auto& [idx, a] : amps_) s += std::conj(a) * other.amplitude(idx);
  return s;
}

std::string QubitWaveFunction::to_string() const {
  if (amps_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [idx, a] : amps_) {
    cxd c = a;
    bool negative = c.imag() == 0.0 && c.real() < 0.0;
    if (negative) c = -c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    out += format_complex(c) + "|" + bits_of(idx, n_qubits_) + ">";
    first = false;
  }
  return out;
}

std::string QubitWaveFunction::bits_of(std::uint64_t index, unsigned n_qubits) {
  std::string s(n_qubits, '0');
  for (unsigned q = 0; q < n_qubits; ++q)
    if (index >> (n_qubits - 1 - q) & 1) s[q] = '1';
  return s;
}

std::uint64_t QubitWaveFunction::index_of(const std::string& bits) {
  std::uint64_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bitstring may contain only 0 and 1");
    idx = (idx << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return idx;
}

}  // namespace varqo
