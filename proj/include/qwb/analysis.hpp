#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qwb/dyadic.hpp"
#include "qwb/weight_state.hpp"

namespace qwb {

using BigInt = boost::multiprecision::cpp_int;

/// A protocol or proof invariant failed during a run.
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(Round k, const std::string& what)
      : std::logic_error("round " + std::to_string(k) + ": " + what), round_(k) {}
  Round round() const { return round_; }

 private:
  Round round_;
};

/// Per-round metrics snapshot, describing the state at round k and the
/// signals emitted from it.
struct RoundRecord {
  Round k = 0;
  unsigned gamma_exp = 0;
  Dyadic eps_l1;
  bool decreasing_event = false;
  /// Potential; empty when no node has negative balance.
  std::optional<BigInt> potential;
  std::size_t signals_fired = 0;
  /// Consensus runs only.
  std::optional<double> mse;
  std::optional<double> v_y;
};

/// ||eps(k)||_1 = sum_i |b_i(k)|.
Dyadic total_imbalance(const DyadicWeightState& s);

/// True iff some firing node has an out-neighbor with negative balance.
bool detect_decreasing_event(const DyadicWeightState& s, const SignalVector& signals);

/// Nodes split by balance sign, with the non-negative side layered by hop
/// distance to the nearest negative-balance node: levels[n - 1] holds V_n.
struct LevelPartition {
  std::vector<NodeId> v_plus;
  std::vector<NodeId> v_minus;
  std::vector<std::vector<NodeId>> levels;

  /// Largest n with V_n nonempty; empty when v_minus is empty.
  std::optional<std::size_t> n_max() const {
    if (levels.empty()) return std::nullopt;
    return levels.size();
  }
};

LevelPartition level_partition(const DyadicWeightState& s, const Digraph& g);

/// Positional potential U(k) = sum_n U_n sum_{i in V_n} min{b_i / gamma, d_i^+},
/// with digit bases u_m = 1 + sum_{i in V_m} d_i^+ and U_n = prod_{m > n} u_m.
/// Throws std::domain_error when V^-- is empty.
BigInt potential_U(const DyadicWeightState& s, const LevelPartition& part);

/// N^(2N).
BigInt potential_ceiling(std::size_t n);

/// V(y) = ||y - y_bar 1||^2.
double squared_deviation(std::span<const double> y, double y_bar0);

/// (1/N) sum_i (y_i - y_bar)^2.
double mse(std::span<const double> y, double y_bar0);

/// sup over recorded k in [k_start, k_end] of k * ||eps(k)||_1, exact.
/// Returns zero when no record falls in the range.
/// Throws std::invalid_argument when k_start == 0.
Dyadic rate_statistic(std::span<const RoundRecord> trajectory, Round k_start,
                      Round k_end = kMaxRound);

/// Aggregate evidence gathered while replaying the proof invariants.
struct ProofDiagnostics {
  std::uint64_t rounds_checked = 0;
  std::uint64_t decreasing_events = 0;
  /// Rounds where the strict potential increase was asserted.
  std::uint64_t potential_steps_checked = 0;
  /// Longest wait from a round with ||eps|| >= 2N(N-1)gamma to the next event.
  Round worst_event_gap = 0;
  BigInt max_potential = 0;
};

/// Builds RoundRecords for consecutive rounds of one run and, when checking is
/// enabled, replays every invariant against the previous round:
///   - sum_i b_i = 0 and b reconciles exactly with the weights;
///   - weights never decrease;
///   - an event lowers ||eps||_1 by at least 2 gamma(k), otherwise it is unchanged;
///   - without an event the sign partition is unchanged;
///   - with ||eps|| >= 2N(N-1)gamma and no event, U(k+1) >= U(k) + 1;
///   - 0 <= U < N^(2N);
///   - an event follows any round with ||eps|| >= 2N(N-1)gamma within N^(2N) rounds.
class RoundAnalyzer {
 public:
  explicit RoundAnalyzer(const Digraph& g, bool check_invariants = true);

  /// Analyzes the state of round k together with its signals. Rounds must be
  /// fed in order, without gaps. Throws InvariantViolation.
  RoundRecord analyze(const DyadicWeightState& s, const SignalVector& signals);

  const ProofDiagnostics& diagnostics() const { return diag_; }

 private:
  struct Snapshot {
    Round k = 0;
    unsigned exp = 0;
    std::int64_t eps = 0;
    bool event = false;
    bool above_threshold = false;
    std::vector<bool> nonnegative;
    std::optional<BigInt> potential;
    std::vector<std::int64_t> weights;
  };

  const Digraph* graph_;
  bool check_;
  BigInt ceiling_;
  std::optional<Snapshot> prev_;
  std::optional<Round> pending_since_;
  ProofDiagnostics diag_;
};

}  // namespace qwb
