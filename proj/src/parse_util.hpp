#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>

#include "varqo/common.hpp"

namespace varqo::detail {

// Minimal scanner shared by the operator and wavefunction text parsers.
// Errors report the byte offset of the offending character.
struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  explicit Cursor(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }
  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(
        str("syntax error at byte ", pos, ": ", what));
  }

  // Unsigned decimal integer.
  unsigned parse_uint() {
    skip_ws();
    if (!std::isdigit(static_cast<unsigned char>(peek())))
      fail("expected a non-negative integer");
    unsigned long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + static_cast<unsigned long>(text[pos] - '0');
      if (v > 1u << 30) fail("qubit index out of range");
      ++pos;
    }
    return static_cast<unsigned>(v);
  }

  // Signed floating-point literal; `allow_sign` permits a leading +/-.
  double parse_real(bool allow_sign) {
    skip_ws();
    std::size_t start = pos;
    if (allow_sign && (peek() == '+' || peek() == '-')) ++pos;
    bool digits = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos, digits = true;
    if (consume('.'))
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos, digits = true;
    if (!digits) {
      pos = start;
      fail("expected a number");
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = pos++;
      if (peek() == '+' || peek() == '-') ++pos;
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        pos = mark;  // 'e' belongs to something else
      else
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
    }
    return std::strtod(text.c_str() + start, nullptr);
  }

  // Complex scalar forms: "1.5", "2i", "(1+0.5i)", "(-2i)". No leading sign
  // outside parentheses; term-level signs belong to the caller.
  // Returns nullopt when the upcoming text cannot start a coefficient.
  std::optional<cxd> try_parse_coefficient() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      std::size_t mark = pos;
      ++pos;
      skip_ws();
      // A '(' might open something else in a host grammar; require a number.
      if (!std::isdigit(static_cast<unsigned char>(peek())) && peek() != '.' &&
          peek() != '+' && peek() != '-') {
        pos = mark;
        return std::nullopt;
      }
      double first = parse_real(/*allow_sign=*/true);
      skip_ws();
      if (consume('i')) {
        skip_ws();
        if (!consume(')')) fail("expected ')'");
        return cxd(0.0, first);
      }
      double im = 0.0;
      if (peek() == '+' || peek() == '-') {
        im = parse_real(/*allow_sign=*/true);
        skip_ws();
        if (!consume('i')) fail("expected 'i'");
        skip_ws();
      }
      if (!consume(')')) fail("expected ')'");
      return cxd(first, im);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = parse_real(/*allow_sign=*/false);
      if (consume('i')) return cxd(0.0, v);
      return cxd(v, 0.0);
    }
    return std::nullopt;
  }
};

}  // namespace varqo::detail
