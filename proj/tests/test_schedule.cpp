#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "qwb/schedule.hpp"

using namespace qwb;

TEST_CASE("gamma opening terms") {
  CHECK(qwb::gamma(0).exponent == 0);
  CHECK(qwb::gamma(1).exponent == 1);
  CHECK(qwb::gamma(2).exponent == 1);
  for (Round k = 3; k <= 6; ++k) CHECK(qwb::gamma(k).exponent == 2);
  CHECK(qwb::gamma(7).exponent == 3);
  CHECK(qwb::gamma(0).value() == 1.0);
  CHECK(qwb::gamma(2).value() == 0.5);
  CHECK(qwb::gamma(5).value() == 0.25);
}

TEST_CASE("gamma at window left endpoints") {
  for (unsigned n = 0; n <= 20; ++n) {
    const Round k = (Round{1} << n) - 1;
    CHECK(qwb::gamma(k).exponent == n);
    CHECK(qwb::gamma(k).value() == std::ldexp(1.0, -static_cast<int>(n)));
  }
  CHECK(qwb::gamma(kMaxRound).exponent == kMaxGammaExponent);
}

TEST_CASE("gamma agrees with the window definition and its sandwich to 1e6") {
  // Oracle: lay the windows [2^n - 1, 2^(n+1) - 2] end to end.
  std::map<unsigned, Round> window_length;
  Round k = 0;
  for (unsigned n = 0; k <= 1000000; ++n) {
    const Round lo = (Round{1} << n) - 1;
    const Round hi = (Round{1} << (n + 1)) - 2;
    REQUIRE(lo == k);
    for (; k <= hi && k <= 1000000; ++k) {
      const unsigned e = qwb::gamma(k).exponent;
      if (e != n) {
        FAIL("window mismatch at k=" << k);
      }
      ++window_length[e];
      // 1/(k+1) <= 2^-e <= 2/(k+1)  <=>  2^e <= k+1 <= 2^(e+1)
      if (!((Round{1} << e) <= k + 1 && k + 1 <= (Round{1} << (e + 1)))) {
        FAIL("sandwich violated at k=" << k);
      }
    }
  }
  for (const auto& [n, len] : window_length) {
    if ((Round{1} << (n + 1)) - 2 <= 1000000) CHECK(len == (Round{1} << n));
  }
}

TEST_CASE("alpha evaluation and validation") {
  const AlphaSchedule harmonic(1.0, 1.0);
  CHECK(alpha(0, harmonic) == 1.0);
  CHECK(alpha(9, harmonic) == doctest::Approx(0.1).epsilon(1e-15));
  const AlphaSchedule slow(2.0, 0.75);
  CHECK(slow(15) == doctest::Approx(2.0 / 8.0));
  CHECK_THROWS_AS(AlphaSchedule(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AlphaSchedule(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AlphaSchedule(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(AlphaSchedule(1.0, 1.01), std::invalid_argument);
}

TEST_CASE("alpha is positive, non-increasing, non-summable, square-summable") {
  for (double tau : {0.51, 0.75, 1.0}) {
    const AlphaSchedule s(1.5, tau);
    double prev = s(0);
    for (Round k = 1; k < 5000; ++k) {
      const double a = s(k);
      CHECK(a > 0.0);
      CHECK(a <= prev);
      prev = a;
    }
  }
  const AlphaSchedule harmonic(1.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  for (Round k = 0; k <= 100000; ++k) {
    const double a = harmonic(k);
    sum += a;
    sum_sq += a * a;
  }
  CHECK(sum > 11.0);
  CHECK(sum_sq < 1.65);
}
