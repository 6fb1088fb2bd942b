#pragma once

#include <boost/multiprecision/cpp_int.hpp>

/// Exact arithmetic used by the enumerator, the coupled runner and every
/// identity check that must hold to the last bit.
namespace ballast {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

/// Exact rational value of a finite double (binary expansion, no rounding).
inline rational rational_from_double(double x) {
  return rational(x);
}

inline double to_double(const rational& r) {
  return r.convert_to<double>();
}

}  // namespace ballast
