#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace flatlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "7", "-7/2", "3.5", "1e-3" into an exact rational.
Rational parse_rational(const std::string& text);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_rational(double value);

BigInt ceil(const Rational& r);
BigInt floor(const Rational& r);

double to_double(const Rational& r);

/// "13/2" or "4" for integers.
std::string to_string(const Rational& r);

}  // namespace flatlab
