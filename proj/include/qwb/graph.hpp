#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace qwb {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Directed hop count between two nodes; empty when the target is unreachable.
using HopCount = std::optional<std::size_t>;

/// Dense N x N matrix of directed shortest-path hop counts.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), hops_(n * n) {}

  std::size_t size() const { return n_; }
  HopCount operator()(NodeId from, NodeId to) const { return hops_[from * n_ + to]; }
  HopCount& at(NodeId from, NodeId to) { return hops_[from * n_ + to]; }

  bool all_finite() const;

 private:
  std::size_t n_ = 0;
  std::vector<HopCount> hops_;
};

/// Static directed graph on nodes 0..N-1 without self-loops.
///
/// Adjacency lists are sorted ascending. The distance matrix is computed once
/// at construction; the object is immutable afterwards and may be shared
/// freely between concurrent trials.
class Digraph {
 public:
  /// Throws std::invalid_argument on out-of-range endpoints, self-loops or
  /// duplicate edges.
  Digraph(std::size_t node_count, std::span<const Edge> edges);

  std::size_t node_count() const { return out_adj_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const NodeId> out_neighbors(NodeId i) const { return out_adj_[i]; }
  std::span<const NodeId> in_neighbors(NodeId i) const { return in_adj_[i]; }
  std::size_t out_degree(NodeId i) const { return out_adj_[i].size(); }
  std::size_t in_degree(NodeId i) const { return in_adj_[i].size(); }

  bool has_edge(NodeId from, NodeId to) const;

  /// Position of `from` within in_neighbors(to), or empty if (from, to) is
  /// not an edge.
  std::optional<std::size_t> in_slot(NodeId from, NodeId to) const;

  const DistanceMatrix& distances() const { return dist_; }
  HopCount distance(NodeId from, NodeId to) const { return dist_(from, to); }

  /// Edges in lexicographic (from, to) order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::vector<NodeId>> out_adj_;
  std::vector<std::vector<NodeId>> in_adj_;
  std::size_t edge_count_ = 0;
  DistanceMatrix dist_;
};

/// BFS hop counts from every node.
DistanceMatrix directed_distances(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

/// Directed ring 0->1->...->N-1->0 plus every other ordered pair (i, j),
/// i != j, added independently with probability p. Pairs are visited in
/// lexicographic order, one engine draw per non-ring pair, so the engine
/// state fully determines the graph.
Digraph generate_ring_plus_random(std::size_t n, double p, std::mt19937_64& rng);

/// Edge-list text format: first line "N", then one "i j" pair per line (0-based).
Digraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Digraph& g);

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qwb
