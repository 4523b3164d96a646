#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace slice {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Accepts "p", "-p", "p/q", and finite decimals such as "0.25" or "-3.5".
Rational parse_rational(std::string_view text);

// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& r);

inline Rational make_rational(long p, long q = 1) { return Rational(p, q); }

}  // namespace slice
