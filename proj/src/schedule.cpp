#include "qwb/schedule.hpp"

#include <stdexcept>
#include <string>

namespace qwb {

AlphaSchedule::AlphaSchedule(double a0, double tau) : a0_(a0), tau_(tau) {
  if (!(a0 > 0.0) || !std::isfinite(a0)) {
    throw std::invalid_argument("alpha scale a0 must be positive, got " + std::to_string(a0));
  }
  if (!(tau > 0.5 && tau <= 1.0)) {
    throw std::invalid_argument("alpha exponent tau must lie in (1/2, 1], got " +
                                std::to_string(tau));
  }
}

double AlphaSchedule::operator()(Round k) const {
  const double base = static_cast<double>(k) + 1.0;
  return tau_ == 1.0 ? a0_ / base : a0_ / std::pow(base, tau_);
}

}  // namespace qwb
