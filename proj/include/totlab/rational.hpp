#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "totlab/errors.hpp"

namespace totlab {

using Rational = mpq_class;

/// Parse an exact rational from "7", "-3/4", "0.125", "5e5" or "2.5E-3".
/// Decimal input is converted exactly; no binary floating point is involved.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw ArgumentError("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    auto is_int = [](std::string_view s) {
      if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
      if (s.empty()) return false;
      for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      }
      return true;
    };
    if (!is_int(num) || !is_int(den)) fail();
    std::string n(num), d(den);
    if (n[0] == '+') n.erase(0, 1);
    if (d[0] == '+') d.erase(0, 1);
    mpz_class zn(n, 10), zd(d, 10);
    if (zd == 0) fail();
    Rational r(zn, zd);
    r.canonicalize();
    return r;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long scale = 0;  // value = digits * 10^(-scale)
  bool seen_digit = false, seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') fail();
    ++i;
    std::string exp_text(text.substr(i));
    if (exp_text.empty()) fail();
    std::size_t pos = 0;
    long e = 0;
    try {
      e = std::stol(exp_text, &pos);
    } catch (const std::exception&) {
      fail();
    }
    if (pos != exp_text.size() || std::labs(e) > 4000) fail();
    scale -= e;
  }
  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  Rational r = scale >= 0 ? Rational(mantissa, power) : Rational(mantissa * power, 1);
  r.canonicalize();
  return r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : r.get_str();
}

/// Natural logarithm of a positive rational, accurate even when num/den overflow a double.
inline double log_rational(const Rational& r) {
  if (r <= 0) throw DomainError("log of a non-positive rational");
  auto log_z = [](const mpz_class& z) {
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
  };
  return log_z(r.get_num()) - log_z(r.get_den());
}

}  // namespace totlab
