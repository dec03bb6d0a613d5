#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace qwb {

using Round = std::uint64_t;

/// Largest dyadic exponent the engine will scale integers by.
inline constexpr unsigned kMaxGammaExponent = 62;

/// Largest round index whose gamma exponent stays within kMaxGammaExponent.
inline constexpr Round kMaxRound = (Round{1} << (kMaxGammaExponent + 1)) - 2;

/// Exact dyadic step 2^-exponent.
struct DyadicStep {
  unsigned exponent = 0;

  double value() const { return std::ldexp(1.0, -static_cast<int>(exponent)); }
  friend bool operator==(const DyadicStep&, const DyadicStep&) = default;
};

/// Weight-balancing step: 2^-n on the window 2^n - 1 <= k <= 2^(n+1) - 2,
/// i.e. n = floor(log2(k + 1)).
constexpr DyadicStep gamma(Round k) {
  return DyadicStep{static_cast<unsigned>(std::bit_width(k + 1) - 1)};
}

/// Consensus step alpha(k) = a0 / (k + 1)^tau with a0 > 0 and tau in (1/2, 1].
class AlphaSchedule {
 public:
  AlphaSchedule() = default;
  /// Throws std::invalid_argument when a0 <= 0 or tau is outside (1/2, 1].
  AlphaSchedule(double a0, double tau);

  double a0() const { return a0_; }
  double tau() const { return tau_; }

  double operator()(Round k) const;

 private:
  double a0_ = 1.0;
  double tau_ = 1.0;
};

inline double alpha(Round k, const AlphaSchedule& sched) { return sched(k); }

}  // namespace qwb
