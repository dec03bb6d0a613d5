#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qwb/dyadic.hpp"
#include "qwb/graph.hpp"
#include "qwb/schedule.hpp"

namespace qwb {

/// One-bit balancing signals n_i(k) for a round.
class SignalVector {
 public:
  SignalVector() = default;
  explicit SignalVector(std::size_t n) : bits_(n, 0) {}

  std::size_t size() const { return bits_.size(); }
  bool fired(NodeId i) const { return bits_[i] != 0; }
  std::uint8_t operator[](NodeId i) const { return bits_[i]; }
  void set(NodeId i, bool on) { bits_[i] = on ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const SignalVector&, const SignalVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Weights and balances of the balancing protocol in exact dyadic form.
///
/// Every stored quantity is an integer numerator in units of 2^-scale_exponent,
/// where scale_exponent is the gamma exponent of the current round. Weights are
/// kept only for incoming edges: node i owns a_ij for j in in_neighbors(i), in
/// the same order.
class DyadicWeightState {
 public:
  const Digraph& graph() const { return *graph_; }
  const std::shared_ptr<const Digraph>& shared_graph() const { return graph_; }

  Round round() const { return k_; }
  unsigned scale_exponent() const { return scale_exp_; }
  DyadicStep step() const { return DyadicStep{scale_exp_}; }

  /// Numerators of a_ij for j in in_neighbors(i).
  std::span<const std::int64_t> in_weights(NodeId i) const {
    return {weights_.data() + in_offset_[i], weights_.data() + in_offset_[i + 1]};
  }
  /// All weight numerators, grouped by receiving node.
  std::span<const std::int64_t> weight_numerators() const { return weights_; }

  /// a_ij, or empty when (j, i) is not an edge.
  std::optional<Dyadic> weight(NodeId i, NodeId j) const;
  double weight_value(NodeId i, NodeId j) const;

  std::span<const std::int64_t> balance_numerators() const { return balance_; }
  Dyadic balance(NodeId i) const { return Dyadic{balance_[i], scale_exp_}; }
  double balance_value(NodeId i) const { return balance(i).to_double(); }

 private:
  friend DyadicWeightState init_balancer(std::shared_ptr<const Digraph> g);
  friend void advance_balancer(DyadicWeightState& s, const SignalVector& signals);

  std::shared_ptr<const Digraph> graph_;
  std::vector<std::size_t> in_offset_;
  std::vector<std::int64_t> weights_;
  std::vector<std::int64_t> balance_;
  unsigned scale_exp_ = 0;
  Round k_ = 0;
};

/// All a_ij = 1 on edges, b_i = d_i^- - d_i^+, k = 0.
/// Throws std::invalid_argument unless g is strongly connected.
DyadicWeightState init_balancer(std::shared_ptr<const Digraph> g);

/// n_i = 1 iff b_i(k) >= d_i^+ * gamma(k), compared on scaled integers.
SignalVector compute_signals(const DyadicWeightState& s);

/// Applies one synchronous round with the given round-k signals: a_ij += n_j
/// gamma, b_i += gamma (sum_{j in N_i^-} n_j - d_i^+ n_i), then advances k and
/// doubles every numerator if the gamma exponent grew.
/// Throws OverflowError if a numerator leaves the int64 range.
void advance_balancer(DyadicWeightState& s, const SignalVector& signals);

/// Pure form of one round: computes the signals and returns the next state.
DyadicWeightState step_balancer(const DyadicWeightState& s);

/// b_i recomputed from the weights as S_i^- - S_i^+ (scaled numerators).
std::vector<std::int64_t> balances_from_weights(const DyadicWeightState& s);

/// Row-major N x N real matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit DenseMatrix(std::size_t size = 0) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

/// A(k) with A[i][j] = a_ij.
DenseMatrix weight_matrix(const DyadicWeightState& s);

/// L+(k) = S+(k) - A(k), with S+ = diag(out-flows).
DenseMatrix out_laplacian(const DyadicWeightState& s);

/// One "i j numerator/2^n" line per edge weight a_ij, rows ordered by (i, j).
std::string format_weights_exact(const DyadicWeightState& s);

}  // namespace qwb
