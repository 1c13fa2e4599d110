#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace perc {

// Exact rational arithmetic for the exponent algebra and the enumeration
// oracle. Denominators of the exponent recursion grow geometrically and leave
// 64-bit range after ~15 iterations, so arbitrary precision is mandatory.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational(std::int64_t num, std::int64_t den = 1) { return Rational(BigInt(num), BigInt(den)); }

// Parses "a/b" or "a"; throws on malformed input or zero denominator.
Rational rational_from_string(const std::string& text);

// Canonical "a/b" (or "a" for integers).
std::string to_string(const Rational& q);

Rational rational_pow(const Rational& base, std::uint64_t exponent);

double to_double(const Rational& q);

bool is_integer(const Rational& q);

// floor/ceil as big integers
BigInt floor_int(const Rational& q);

// Smallest integer strictly greater than q (strict-inequality thresholds).
BigInt strict_integer_above(const Rational& q);

}  // namespace perc
