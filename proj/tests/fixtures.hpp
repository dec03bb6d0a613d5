#pragma once

#include <memory>
#include <random>
#include <vector>

#include "qwb/graph.hpp"

namespace qwb::testing {

/// 3-node fixture {0->1, 0->2, 1->2, 2->0}.
inline std::shared_ptr<const Digraph> three_node() {
  const std::vector<Edge> edges = {{0, 1}, {0, 2}, {1, 2}, {2, 0}};
  return std::make_shared<const Digraph>(3, edges);
}

inline std::shared_ptr<const Digraph> ring(std::size_t n) {
  std::mt19937_64 rng(0);
  return std::make_shared<const Digraph>(generate_ring_plus_random(n, 0.0, rng));
}

inline std::shared_ptr<const Digraph> random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return std::make_shared<const Digraph>(generate_ring_plus_random(n, p, rng));
}

}  // namespace qwb::testing
