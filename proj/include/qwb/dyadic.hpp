#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qwb {

/// Raised when a scaled integer would leave the int64 range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Exact value numerator * 2^-exponent.
struct Dyadic {
  std::int64_t numerator = 0;
  unsigned exponent = 0;

  double to_double() const { return std::ldexp(static_cast<double>(numerator), -static_cast<int>(exponent)); }

  /// "numerator/2^exponent", e.g. "3/2^4".
  std::string to_string() const {
    return std::to_string(numerator) + "/2^" + std::to_string(exponent);
  }

  /// Value comparison (3/2^1 == 6/2^2).
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const unsigned e = a.exponent > b.exponent ? a.exponent : b.exponent;
    const __int128 lhs = static_cast<__int128>(a.numerator) << (e - a.exponent);
    const __int128 rhs = static_cast<__int128>(b.numerator) << (e - b.exponent);
    return lhs <=> rhs;
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) { return (a <=> b) == 0; }
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("scaled integer overflow in addition");
  return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("scaled integer overflow in multiplication");
  }
  return out;
}

}  // namespace qwb
