#include "qwb/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qwb {

bool DistanceMatrix::all_finite() const {
  return std::all_of(hops_.begin(), hops_.end(), [](const HopCount& h) { return h.has_value(); });
}

Digraph::Digraph(std::size_t node_count, std::span<const Edge> edges)
    : out_adj_(node_count), in_adj_(node_count) {
  if (node_count == 0) {
    throw std::invalid_argument("digraph needs at least one node");
  }
  for (const auto& [from, to] : edges) {
    if (from >= node_count || to >= node_count) {
      throw std::invalid_argument("edge (" + std::to_string(from) + ", " + std::to_string(to) +
                                  ") references a node outside 0.." +
                                  std::to_string(node_count - 1));
    }
    if (from == to) {
      throw std::invalid_argument("self-loop at node " + std::to_string(from));
    }
    out_adj_[from].push_back(to);
    in_adj_[to].push_back(from);
  }
  for (auto& adj : out_adj_) std::sort(adj.begin(), adj.end());
  for (auto& adj : in_adj_) std::sort(adj.begin(), adj.end());
  for (NodeId i = 0; i < node_count; ++i) {
    if (std::adjacent_find(out_adj_[i].begin(), out_adj_[i].end()) != out_adj_[i].end()) {
      throw std::invalid_argument("duplicate edge out of node " + std::to_string(i));
    }
  }
  edge_count_ = edges.size();
  dist_ = directed_distances(*this);
}

bool Digraph::has_edge(NodeId from, NodeId to) const {
  return std::binary_search(out_adj_[from].begin(), out_adj_[from].end(), to);
}

std::optional<std::size_t> Digraph::in_slot(NodeId from, NodeId to) const {
  const auto& adj = in_adj_[to];
  auto it = std::lower_bound(adj.begin(), adj.end(), from);
  if (it == adj.end() || *it != from) return std::nullopt;
  return static_cast<std::size_t>(it - adj.begin());
}

std::vector<Edge> Digraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId i = 0; i < out_adj_.size(); ++i) {
    for (NodeId j : out_adj_[i]) out.emplace_back(i, j);
  }
  return out;
}

DistanceMatrix directed_distances(const Digraph& g) {
  const std::size_t n = g.node_count();
  DistanceMatrix dist(n);
  std::deque<NodeId> frontier;
  for (NodeId src = 0; src < n; ++src) {
    dist.at(src, src) = 0;
    frontier.assign(1, src);
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop_front();
      const std::size_t du = *dist(src, u);
      for (NodeId v : g.out_neighbors(u)) {
        if (!dist(src, v)) {
          dist.at(src, v) = du + 1;
          frontier.push_back(v);
        }
      }
    }
  }
  return dist;
}

bool is_strongly_connected(const Digraph& g) { return g.distances().all_finite(); }

Digraph generate_ring_plus_random(std::size_t n, double p, std::mt19937_64& rng) {
  if (n < 2) {
    throw std::invalid_argument("ring+random generator needs N >= 2, got " + std::to_string(n));
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("edge probability must lie in [0, 1], got " + std::to_string(p));
  }
  std::vector<Edge> edges;
  edges.reserve(n + n * (n - 1) / 2);
  for (NodeId i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j || j == (i + 1) % n) continue;
      if (unit_uniform(rng) < p) edges.emplace_back(i, j);
    }
  }
  return Digraph(n, edges);
}

Digraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string probe;
    if (!(fields >> probe)) continue;
    fields.clear();
    fields.str(line);
    if (!n) {
      std::size_t count = 0;
      if (!(fields >> count) || count == 0) {
        throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                    ": expected positive node count");
      }
      n = count;
      continue;
    }
    long long from = -1, to = -1;
    if (!(fields >> from >> to) || from < 0 || to < 0 || (fields >> probe)) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected \"i j\" with non-negative integers");
    }
    edges.emplace_back(static_cast<NodeId>(from), static_cast<NodeId>(to));
  }
  if (!n) throw std::invalid_argument("edge list is empty");
  return Digraph(*n, edges);
}

void write_edge_list(std::ostream& out, const Digraph& g) {
  out << g.node_count() << '\n';
  for (const auto& [from, to] : g.edges()) out << from << ' ' << to << '\n';
}

}  // namespace qwb
