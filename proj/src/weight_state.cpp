#include "qwb/weight_state.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qwb {

std::size_t SignalVector::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::optional<Dyadic> DyadicWeightState::weight(NodeId i, NodeId j) const {
  auto slot = graph_->in_slot(j, i);
  if (!slot) return std::nullopt;
  return Dyadic{weights_[in_offset_[i] + *slot], scale_exp_};
}

double DyadicWeightState::weight_value(NodeId i, NodeId j) const {
  auto w = weight(i, j);
  return w ? w->to_double() : 0.0;
}

DyadicWeightState init_balancer(std::shared_ptr<const Digraph> g) {
  if (!g) throw std::invalid_argument("balancer needs a graph");
  if (!is_strongly_connected(*g)) {
    throw std::invalid_argument("weight balancing requires a strongly connected digraph");
  }
  const std::size_t n = g->node_count();
  DyadicWeightState s;
  s.in_offset_.assign(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) s.in_offset_[i + 1] = s.in_offset_[i] + g->in_degree(i);
  s.weights_.assign(s.in_offset_[n], 1);
  s.balance_.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    s.balance_[i] = static_cast<std::int64_t>(g->in_degree(i)) -
                    static_cast<std::int64_t>(g->out_degree(i));
  }
  s.graph_ = std::move(g);
  return s;
}

SignalVector compute_signals(const DyadicWeightState& s) {
  const Digraph& g = s.graph();
  SignalVector signals(g.node_count());
  const auto bal = s.balance_numerators();
  for (NodeId i = 0; i < g.node_count(); ++i) {
    signals.set(i, bal[i] >= static_cast<std::int64_t>(g.out_degree(i)));
  }
  return signals;
}

void advance_balancer(DyadicWeightState& s, const SignalVector& signals) {
  const Digraph& g = *s.graph_;
  const std::size_t n = g.node_count();
  if (signals.size() != n) throw std::invalid_argument("signal vector size mismatch");
  if (s.k_ >= kMaxRound) {
    throw OverflowError("round counter exceeds the supported gamma exponent range");
  }

  // One unit of the current step per firing in-neighbor; d_i^+ units out per own firing.
  for (NodeId i = 0; i < n; ++i) {
    const auto in = g.in_neighbors(i);
    std::int64_t received = 0;
    for (std::size_t slot = 0; slot < in.size(); ++slot) {
      if (signals.fired(in[slot])) {
        auto& w = s.weights_[s.in_offset_[i] + slot];
        w = checked_add(w, 1);
        ++received;
      }
    }
    std::int64_t delta = received;
    if (signals.fired(i)) delta -= static_cast<std::int64_t>(g.out_degree(i));
    s.balance_[i] = checked_add(s.balance_[i], delta);
  }

  ++s.k_;
  const unsigned next_exp = gamma(s.k_).exponent;
  if (next_exp != s.scale_exp_) {
    for (auto& w : s.weights_) w = checked_mul(w, 2);
    for (auto& b : s.balance_) b = checked_mul(b, 2);
    s.scale_exp_ = next_exp;
  }
}

DyadicWeightState step_balancer(const DyadicWeightState& s) {
  DyadicWeightState next = s;
  advance_balancer(next, compute_signals(s));
  return next;
}

std::vector<std::int64_t> balances_from_weights(const DyadicWeightState& s) {
  const Digraph& g = s.graph();
  std::vector<std::int64_t> bal(g.node_count(), 0);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto in = g.in_neighbors(i);
    const auto w = s.in_weights(i);
    for (std::size_t slot = 0; slot < in.size(); ++slot) {
      bal[i] = checked_add(bal[i], w[slot]);     // in-flow of i
      bal[in[slot]] = checked_add(bal[in[slot]], -w[slot]);  // out-flow of the sender
    }
  }
  return bal;
}

DenseMatrix weight_matrix(const DyadicWeightState& s) {
  const Digraph& g = s.graph();
  DenseMatrix a(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto in = g.in_neighbors(i);
    const auto w = s.in_weights(i);
    for (std::size_t slot = 0; slot < in.size(); ++slot) {
      a(i, in[slot]) = Dyadic{w[slot], s.scale_exponent()}.to_double();
    }
  }
  return a;
}

DenseMatrix out_laplacian(const DyadicWeightState& s) {
  DenseMatrix l = weight_matrix(s);
  const std::size_t n = l.n;
  std::vector<double> out_flow(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out_flow[j] += l(i, j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) l(i, j) = -l(i, j);
    l(i, i) += out_flow[i];
  }
  return l;
}

std::string format_weights_exact(const DyadicWeightState& s) {
  const Digraph& g = s.graph();
  std::ostringstream out;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto in = g.in_neighbors(i);
    const auto w = s.in_weights(i);
    for (std::size_t slot = 0; slot < in.size(); ++slot) {
      out << i << ' ' << in[slot] << ' ' << Dyadic{w[slot], s.scale_exponent()}.to_string()
          << '\n';
    }
  }
  return out.str();
}

}  // namespace qwb
