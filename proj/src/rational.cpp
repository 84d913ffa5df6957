#include "flatlab/rational.hpp"

#include <cctype>
#include <cmath>

#include "flatlab/common.hpp"

namespace flatlab {

namespace {

BigInt pow10(long e) {
  BigInt p = 1;
  for (long i = 0; i < e; ++i) p *= 10;
  return p;
}

Rational parse_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  BigInt mantissa = 0;
  long scale = 0;
  bool digits = false;
  bool point = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mantissa = mantissa * 10 + (ch - '0');
      digits = true;
      if (point) ++scale;
    } else if (ch == '.' && !point) {
      point = true;
    } else {
      break;
    }
  }
  if (!digits) throw ParameterError("not a number: '" + text + "'");
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    std::size_t used = 0;
    try {
      exponent = std::stol(text.substr(i + 1), &used);
    } catch (const std::exception&) {
      throw ParameterError("bad exponent in '" + text + "'");
    }
    i += 1 + used;
  }
  if (i != text.size()) throw ParameterError("trailing characters in '" + text + "'");
  if (exponent - scale > 400 || scale - exponent > 400)
    throw ParameterError("exponent out of range in '" + text + "'");
  Rational value(mantissa);
  const long shift = exponent - scale;
  if (shift >= 0)
    value *= Rational(pow10(shift));
  else
    value /= Rational(pow10(-shift));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw ParameterError("zero denominator in '" + text + "'");
  return num / den;
}

Rational exact_rational(double value) {
  if (!std::isfinite(value)) throw ParameterError("non-finite value has no rational form");
  int exp = 0;
  const double frac = std::frexp(value, &exp);
  // frac * 2^53 is an integer for every finite double.
  const auto mant = static_cast<long long>(std::ldexp(frac, 53));
  Rational r(mant);
  exp -= 53;
  BigInt two_pow = 1;
  two_pow <<= std::abs(exp);
  if (exp >= 0)
    r *= Rational(two_pow);
  else
    r /= Rational(two_pow);
  return r;
}

BigInt floor(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;  // truncates toward zero
  if (num % den != 0 && num < 0) q -= 1;
  return q;
}

BigInt ceil(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num % den != 0 && num > 0) q += 1;
  return q;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

}  // namespace flatlab
