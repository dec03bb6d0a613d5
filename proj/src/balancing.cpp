#include "qwb/balancing.hpp"

namespace qwb {

BalanceRunResult run_balancer(DyadicWeightState s, const BalanceRunOptions& options,
                              const BalanceObserver& observer) {
  if (options.tol && !(*options.tol >= 0.0)) {
    throw std::invalid_argument("balancing tolerance must be non-negative");
  }
  RoundAnalyzer analyzer(s.graph(), options.check_invariants);
  for (;;) {
    const SignalVector signals = compute_signals(s);
    const RoundRecord rec = analyzer.analyze(s, signals);
    if (observer) observer(rec);
    const bool converged = options.tol && rec.eps_l1.to_double() <= *options.tol;
    if (converged || s.round() >= options.max_iters) break;
    advance_balancer(s, signals);
  }
  const Round stopped = s.round();
  return BalanceRunResult{std::move(s), stopped, analyzer.diagnostics()};
}

BalanceRunResult run_balancer(DyadicWeightState s, double tol, Round max_iters,
                              const BalanceObserver& observer) {
  return run_balancer(std::move(s), BalanceRunOptions{tol, max_iters, true}, observer);
}

}  // namespace qwb
