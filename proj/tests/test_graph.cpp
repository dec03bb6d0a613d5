#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "fixtures.hpp"
#include "qwb/graph.hpp"

using namespace qwb;

namespace {

// Shortest hop count by enumerating every simple path; exponential, test-only.
HopCount brute_force_distance(const Digraph& g, NodeId from, NodeId to) {
  if (from == to) return 0;
  HopCount best;
  std::vector<bool> on_path(g.node_count(), false);
  std::function<void(NodeId, std::size_t)> walk = [&](NodeId u, std::size_t len) {
    if (u == to) {
      if (!best || len < *best) best = len;
      return;
    }
    on_path[u] = true;
    for (NodeId v : g.out_neighbors(u)) {
      if (!on_path[v]) walk(v, len + 1);
    }
    on_path[u] = false;
  };
  walk(from, 0);
  return best;
}

}  // namespace

TEST_CASE("ring with p=0 is the bare cycle") {
  auto g = testing::ring(6);
  CHECK(g->edge_count() == 6);
  for (NodeId i = 0; i < 6; ++i) {
    CHECK(g->out_degree(i) == 1);
    CHECK(g->in_degree(i) == 1);
    CHECK(g->has_edge(i, (i + 1) % 6));
  }
  CHECK(g->distance(0, 3) == HopCount{3});
  CHECK(g->distance(3, 0) == HopCount{3});
  CHECK(is_strongly_connected(*g));
}

TEST_CASE("p=1 gives the complete digraph") {
  auto g = testing::random_graph(6, 1.0, 99);
  CHECK(g->edge_count() == 30);
  for (NodeId i = 0; i < 6; ++i) {
    CHECK(g->out_degree(i) == 5);
    CHECK(g->in_degree(i) == 5);
  }
}

TEST_CASE("extra-edge count follows Binomial(24, 0.5)") {
  const int seeds = 1000;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(1000 + s);
    sum += static_cast<double>(generate_ring_plus_random(6, 0.5, rng).edge_count() - 6);
  }
  const double mean = sum / seeds;
  const double se = std::sqrt(24 * 0.25) / std::sqrt(double(seeds));
  CHECK(std::abs(mean - 12.0) <= 3 * se);
}

TEST_CASE("generator rejects bad parameters") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(generate_ring_plus_random(1, 0.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(generate_ring_plus_random(6, -0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(generate_ring_plus_random(6, 1.5, rng), std::invalid_argument);
}

TEST_CASE("same seed, same graph") {
  auto a = testing::random_graph(8, 0.3, 42);
  auto b = testing::random_graph(8, 0.3, 42);
  CHECK(a->edges() == b->edges());
}

TEST_CASE("three-node fixture distances") {
  auto g = testing::three_node();
  CHECK(g->distance(1, 0) == HopCount{2});
  CHECK(brute_force_distance(*g, 1, 0) == HopCount{2});
  CHECK(g->distance(0, 2) == HopCount{1});
  for (NodeId i = 0; i < 3; ++i) CHECK(g->distance(i, i) == HopCount{0});
}

TEST_CASE("one-way pair is not strongly connected") {
  const std::vector<Edge> edges = {{0, 1}};
  Digraph g(2, edges);
  CHECK_FALSE(is_strongly_connected(g));
  CHECK_FALSE(g.distance(1, 0).has_value());
  CHECK(g.distance(0, 1) == HopCount{1});
}

TEST_CASE("construction rejects self-loops, duplicates and bad endpoints") {
  const std::vector<Edge> loop = {{0, 0}};
  const std::vector<Edge> dup = {{0, 1}, {0, 1}};
  const std::vector<Edge> range = {{0, 3}};
  CHECK_THROWS_AS(Digraph(2, loop), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, dup), std::invalid_argument);
  CHECK_THROWS_AS(Digraph(2, range), std::invalid_argument);
}

TEST_CASE("BFS distances match path enumeration on random graphs") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 3 + seed % 5;
    // Random edge sets without the ring, so unreachable pairs appear too.
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = 0; j < n; ++j)
        if (i != j && unit_uniform(rng) < 0.3) edges.emplace_back(i, j);
    Digraph g(n, edges);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        CHECK(g.distance(i, j) == brute_force_distance(g, i, j));
        for (NodeId m = 0; m < n; ++m) {
          auto ij = g.distance(i, j), jm = g.distance(j, m), im = g.distance(i, m);
          if (ij && jm) {
            REQUIRE(im.has_value());
            CHECK(*im <= *ij + *jm);
          }
        }
      }
    }
    CHECK(is_strongly_connected(g) == directed_distances(g).all_finite());
  }
}

TEST_CASE("adjacency duality and ring membership on generated graphs") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto g = testing::random_graph(7, 0.4, seed);
    CHECK(is_strongly_connected(*g));
    std::size_t in_total = 0;
    for (NodeId i = 0; i < g->node_count(); ++i) {
      CHECK(g->out_degree(i) >= 1);
      CHECK(g->in_degree(i) >= 1);
      in_total += g->in_degree(i);
      for (NodeId j : g->out_neighbors(i)) {
        CHECK(j != i);
        auto in = g->in_neighbors(j);
        CHECK(std::find(in.begin(), in.end(), i) != in.end());
      }
    }
    CHECK(in_total == g->edge_count());
  }
}

TEST_CASE("edge-list text round trip") {
  auto g = testing::random_graph(6, 0.5, 7);
  std::stringstream buf;
  write_edge_list(buf, *g);
  Digraph back = read_edge_list(buf);
  CHECK(back.node_count() == 6);
  CHECK(back.edges() == g->edges());

  std::istringstream fixture("# fixture\n3\n0 1\n0 2\n1 2\n2 0\n");
  CHECK(read_edge_list(fixture).edges() == testing::three_node()->edges());

  std::istringstream bad("3\n0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_edge_list(empty), std::invalid_argument);
}
