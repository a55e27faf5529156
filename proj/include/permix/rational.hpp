#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace permix {

/// Exact rational arithmetic; used to validate the floating-point paths.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace permix
