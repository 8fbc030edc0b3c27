#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>

namespace ffp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// Scalar conversion helper so templated transforms can consume exact weights.
template <class S>
S scalar_from(const Rational& r);

template <>
inline Rational scalar_from<Rational>(const Rational& r) {
  return r;
}

template <>
inline double scalar_from<double>(const Rational& r) {
  return to_double(r);
}

template <class S>
S scalar_from_int(long long n) {
  return S(n);
}

// "num/den" fixture format, denominator omitted when 1.
inline std::string rational_to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  BigInt num(s.substr(0, slash));
  BigInt den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return Rational(num, den);
}

template <class S>
S scalar_pow(const S& base, int e) {
  S acc(1);
  S b = base;
  int n = e;
  if (n < 0) throw std::invalid_argument("scalar_pow: negative exponent");
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

}  // namespace ffp
