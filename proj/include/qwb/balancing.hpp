#pragma once

#include <functional>
#include <optional>

#include "qwb/analysis.hpp"
#include "qwb/weight_state.hpp"

namespace qwb {

using BalanceObserver = std::function<void(const RoundRecord&)>;

struct BalanceRunOptions {
  /// Stop once ||eps(k)||_1 <= tol; empty runs all max_iters rounds.
  std::optional<double> tol = 0.0;
  Round max_iters = 100000;
  /// Replays the convergence invariants every round and throws
  /// InvariantViolation on the first failure.
  bool check_invariants = true;
};

struct BalanceRunResult {
  DyadicWeightState state;
  /// Round at which the run stopped.
  Round rounds = 0;
  ProofDiagnostics diagnostics;
};

/// Runs rounds until the tolerance or max_iters is reached. The observer sees
/// the record of every round from k = 0 up to and including the stopping round.
BalanceRunResult run_balancer(DyadicWeightState s, const BalanceRunOptions& options,
                              const BalanceObserver& observer = {});

BalanceRunResult run_balancer(DyadicWeightState s, double tol, Round max_iters,
                              const BalanceObserver& observer = {});

}  // namespace qwb
