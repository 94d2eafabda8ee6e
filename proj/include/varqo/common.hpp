#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace varqo {

using cxd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Simplified operators drop terms below this magnitude; matches the noise
// floor of double-precision coefficient arithmetic.
inline constexpr double kCoeffDropTol = 1e-12;

namespace detail {

template <typename... Ts>
std::string str(Ts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

inline std::size_t hash_double(double v) {
  if (v == 0.0) v = 0.0;  // merge -0.0 and +0.0
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return std::hash<std::uint64_t>{}(bits);
}

}  // namespace detail

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed significant digits, for display contexts that do not round-trip.
inline std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return std::string(buf);
}

}  // namespace varqo
