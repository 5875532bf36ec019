#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "atlas/error.hpp"

namespace atlas {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

namespace detail {

// GMP treats a leading 0 as an octal prefix, so digits are normalized first.
inline BigInt parse_integer(std::string_view text, const std::string& whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw Error(Errc::ParseError, "not a rational literal: '" + whole + "'");
  for (char c : text)
    if (c < '0' || c > '9') throw Error(Errc::ParseError, "not a rational literal: '" + whole + "'");
  while (text.size() > 1 && text.front() == '0') text.remove_prefix(1);
  BigInt value{std::string(text)};
  return negative ? BigInt(-value) : value;
}

}  // namespace detail

/// Parses "p/q", "p" or a plain decimal such as "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  std::string_view view(text);
  if (auto slash = view.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_integer(view.substr(0, slash), text);
    BigInt den = detail::parse_integer(view.substr(slash + 1), text);
    if (den == 0) throw Error(Errc::ParseError, "zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (auto dot = view.find('.'); dot != std::string_view::npos) {
    std::string digits = std::string(view.substr(0, dot)) + std::string(view.substr(dot + 1));
    if (digits == "-" || digits == "+" || digits.empty())
      throw Error(Errc::ParseError, "not a rational literal: '" + text + "'");
    BigInt denom = 1;
    for (std::size_t i = dot + 1; i < view.size(); ++i) denom *= 10;
    return Rational(detail::parse_integer(digits, text), denom);
  }
  return Rational(detail::parse_integer(view, text));
}

inline std::string to_string(const Rational& value) { return value.str(); }

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

/// Exact rational image of a finite double.
inline Rational from_double(double value) { return Rational(value); }

inline BigInt lcm_of_denominators(const std::vector<Rational>& values) {
  BigInt acc = 1;
  for (const auto& v : values) {
    BigInt d = boost::multiprecision::denominator(v);
    acc = boost::multiprecision::lcm(acc, d);
  }
  return acc;
}

}  // namespace atlas
