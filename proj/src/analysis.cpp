#include "qwb/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qwb {

Dyadic total_imbalance(const DyadicWeightState& s) {
  std::int64_t sum = 0;
  for (std::int64_t b : s.balance_numerators()) sum = checked_add(sum, b < 0 ? -b : b);
  return Dyadic{sum, s.scale_exponent()};
}

bool detect_decreasing_event(const DyadicWeightState& s, const SignalVector& signals) {
  const Digraph& g = s.graph();
  const auto bal = s.balance_numerators();
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (!signals.fired(i)) continue;
    for (NodeId j : g.out_neighbors(i)) {
      if (bal[j] < 0) return true;
    }
  }
  return false;
}

LevelPartition level_partition(const DyadicWeightState& s, const Digraph& g) {
  LevelPartition part;
  const auto bal = s.balance_numerators();
  for (NodeId i = 0; i < g.node_count(); ++i) {
    (bal[i] >= 0 ? part.v_plus : part.v_minus).push_back(i);
  }
  if (part.v_minus.empty()) return part;

  for (NodeId i : part.v_plus) {
    std::optional<std::size_t> nearest;
    for (NodeId j : part.v_minus) {
      auto d = g.distance(i, j);
      if (d && (!nearest || *d < *nearest)) nearest = d;
    }
    if (!nearest) continue;
    if (part.levels.size() < *nearest) part.levels.resize(*nearest);
    part.levels[*nearest - 1].push_back(i);
  }
  return part;
}

BigInt potential_U(const DyadicWeightState& s, const LevelPartition& part) {
  if (part.v_minus.empty()) {
    throw std::domain_error("potential is undefined when no node has negative balance");
  }
  const Digraph& g = s.graph();
  const auto bal = s.balance_numerators();
  BigInt total = 0;
  BigInt place = 1;  // U_n, built from the least significant digit upward
  for (std::size_t level = part.levels.size(); level-- > 0;) {
    std::int64_t digit = 0;
    std::int64_t base = 1;
    for (NodeId i : part.levels[level]) {
      const auto d_out = static_cast<std::int64_t>(g.out_degree(i));
      if (bal[i] < 0) throw std::logic_error("negative balance inside V+");
      digit += std::min(bal[i], d_out);
      base += d_out;
    }
    total += place * digit;
    place *= base;
  }
  return total;
}

BigInt potential_ceiling(std::size_t n) {
  return boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(2 * n));
}

double squared_deviation(std::span<const double> y, double y_bar0) {
  double v = 0.0;
  for (double yi : y) v += (yi - y_bar0) * (yi - y_bar0);
  return v;
}

double mse(std::span<const double> y, double y_bar0) {
  if (y.empty()) return 0.0;
  return squared_deviation(y, y_bar0) / static_cast<double>(y.size());
}

Dyadic rate_statistic(std::span<const RoundRecord> trajectory, Round k_start, Round k_end) {
  if (k_start == 0) throw std::invalid_argument("rate statistic needs k_start >= 1");
  Dyadic best{0, 0};
  for (const RoundRecord& r : trajectory) {
    if (r.k < k_start || r.k > k_end) continue;
    if (r.k > static_cast<Round>(std::numeric_limits<std::int64_t>::max())) {
      throw OverflowError("round index too large for the rate statistic");
    }
    Dyadic scaled{checked_mul(static_cast<std::int64_t>(r.k), r.eps_l1.numerator),
                  r.eps_l1.exponent};
    if (scaled > best) best = scaled;
  }
  return best;
}

RoundAnalyzer::RoundAnalyzer(const Digraph& g, bool check_invariants)
    : graph_(&g), check_(check_invariants), ceiling_(potential_ceiling(g.node_count())) {}

RoundRecord RoundAnalyzer::analyze(const DyadicWeightState& s, const SignalVector& signals) {
  const Digraph& g = *graph_;
  const std::size_t n = g.node_count();
  const auto bal = s.balance_numerators();

  RoundRecord rec;
  rec.k = s.round();
  rec.gamma_exp = s.scale_exponent();
  rec.eps_l1 = total_imbalance(s);
  rec.decreasing_event = detect_decreasing_event(s, signals);
  rec.signals_fired = signals.count();
  const LevelPartition part = level_partition(s, g);
  if (!part.v_minus.empty()) rec.potential = potential_U(s, part);

  if (rec.decreasing_event) ++diag_.decreasing_events;
  if (rec.potential && *rec.potential > diag_.max_potential) diag_.max_potential = *rec.potential;

  const auto threshold = static_cast<std::int64_t>(2 * n * (n - 1));
  const bool above = rec.eps_l1.numerator >= threshold;

  if (check_) {
    const Round k = rec.k;
    if (prev_ && prev_->k + 1 != k) {
      throw InvariantViolation(k, "rounds analyzed out of order");
    }
    const std::int64_t total = std::accumulate(bal.begin(), bal.end(), std::int64_t{0});
    if (total != 0) throw InvariantViolation(k, "total balance is not conserved");
    if (balances_from_weights(s) != std::vector<std::int64_t>(bal.begin(), bal.end())) {
      throw InvariantViolation(k, "tracked balances disagree with the weight matrix");
    }
    if (rec.potential) {
      if (*rec.potential < 0 || *rec.potential >= ceiling_) {
        throw InvariantViolation(k, "potential outside [0, N^(2N))");
      }
    }

    if (prev_) {
      const unsigned shift = rec.gamma_exp - prev_->exp;
      const auto w = s.weight_numerators();
      for (std::size_t e = 0; e < w.size(); ++e) {
        if (w[e] < (prev_->weights[e] << shift)) {
          throw InvariantViolation(k, "an edge weight decreased");
        }
      }

      const std::int64_t before = prev_->eps << shift;
      if (prev_->event) {
        if (rec.eps_l1.numerator > ((prev_->eps - 2) << shift)) {
          throw InvariantViolation(k, "decreasing event did not lower the imbalance by 2 gamma");
        }
      } else {
        if (rec.eps_l1.numerator != before) {
          throw InvariantViolation(k, "imbalance changed without a decreasing event");
        }
        for (NodeId i = 0; i < n; ++i) {
          if ((bal[i] >= 0) != prev_->nonnegative[i]) {
            throw InvariantViolation(k, "sign partition changed without a decreasing event");
          }
        }
        if (prev_->above_threshold) {
          if (!prev_->potential || !rec.potential || *rec.potential < *prev_->potential + 1) {
            throw InvariantViolation(k, "potential failed to increase between decreasing events");
          }
          ++diag_.potential_steps_checked;
        }
      }
    }

    if (above && !pending_since_) pending_since_ = k;
    if (pending_since_) {
      const Round gap = k - *pending_since_;
      if (BigInt(gap) > ceiling_) {
        throw InvariantViolation(k, "no decreasing event within N^(2N) rounds");
      }
      if (rec.decreasing_event) {
        diag_.worst_event_gap = std::max(diag_.worst_event_gap, gap);
        pending_since_.reset();
      }
    }

    Snapshot snap;
    snap.k = k;
    snap.exp = rec.gamma_exp;
    snap.eps = rec.eps_l1.numerator;
    snap.event = rec.decreasing_event;
    snap.above_threshold = above;
    snap.nonnegative.resize(n);
    for (NodeId i = 0; i < n; ++i) snap.nonnegative[i] = bal[i] >= 0;
    snap.potential = rec.potential;
    snap.weights.assign(s.weight_numerators().begin(), s.weight_numerators().end());
    prev_ = std::move(snap);
  }

  ++diag_.rounds_checked;
  return rec;
}

}  // namespace qwb
