#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

/// Shared enums and small helpers used across the ballast library.
namespace ballast {

inline constexpr const char* kVersion = "0.1.0";

/// Base used wherever a logarithm of n enters a formula (quantile grids,
/// potential-function exponents).  `natural` is the library default.
enum class LogBase {
  natural,
  two,
};

/// log(n) in the requested base, as long double for downstream rounding.
inline long double log_of(long double x, LogBase base) {
  if (x <= 0.0L) {
    throw std::invalid_argument("log_of: argument must be positive");
  }
  return base == LogBase::natural ? std::log(x) : std::log2(x);
}

inline std::string to_string(LogBase base) {
  return base == LogBase::natural ? "e" : "2";
}

inline LogBase log_base_from_string(const std::string& s) {
  if (s == "e" || s == "natural") return LogBase::natural;
  if (s == "2" || s == "two") return LogBase::two;
  throw std::invalid_argument("unknown log base '" + s + "' (expected 'e' or '2')");
}

}  // namespace ballast
