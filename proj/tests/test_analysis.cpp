#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "qwb/analysis.hpp"
#include "qwb/balancing.hpp"

using namespace qwb;

TEST_CASE("total imbalance") {
  CHECK(total_imbalance(init_balancer(testing::ring(6))) == Dyadic{0, 0});
  auto s = init_balancer(testing::three_node());
  CHECK(total_imbalance(s) == Dyadic{2, 0});
  CHECK(total_imbalance(step_balancer(s)) == Dyadic{0, 1});
}

TEST_CASE("imbalance numerator is always even") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = init_balancer(testing::random_graph(6, 0.5, seed));
    for (int r = 0; r < 200; ++r) {
      CHECK(total_imbalance(s).numerator % 2 == 0);
      s = step_balancer(s);
    }
  }
}

TEST_CASE("decreasing event detection") {
  auto s = init_balancer(testing::three_node());
  CHECK(detect_decreasing_event(s, compute_signals(s)));

  auto balanced = init_balancer(testing::ring(6));
  CHECK_FALSE(detect_decreasing_event(balanced, compute_signals(balanced)));

  const std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 3}, {2, 0}};
  auto g = std::make_shared<const Digraph>(4, edges);
  auto t = init_balancer(g);
  // b = (2-1, 1-2, 1-2, 2-1) = (1, -1, -1, 1)
  SignalVector sig(4);
  sig.set(0, true);
  CHECK(detect_decreasing_event(t, sig));  // out-neighbor 1 is negative
  SignalVector quiet(4);
  quiet.set(3, true);
  CHECK_FALSE(detect_decreasing_event(t, quiet));  // 3's only out-neighbor 0 is positive
}

TEST_CASE("level partition on the fixture") {
  auto g = testing::three_node();
  auto s = init_balancer(g);
  const auto part = level_partition(s, *g);
  CHECK(part.v_minus == std::vector<NodeId>{0});
  CHECK(part.v_plus == std::vector<NodeId>{1, 2});
  REQUIRE(part.levels.size() == 2);
  CHECK(part.levels[0] == std::vector<NodeId>{2});
  CHECK(part.levels[1] == std::vector<NodeId>{1});
  CHECK(part.n_max() == std::optional<std::size_t>{2});
}

TEST_CASE("level partition edge cases") {
  auto ring = testing::ring(6);
  const auto balanced = level_partition(init_balancer(ring), *ring);
  CHECK(balanced.v_minus.empty());
  CHECK(balanced.levels.empty());
  CHECK_FALSE(balanced.n_max().has_value());

  // Ring plus chords into node 0: b = (3-1, 1-2, 1-2, 1-1) = (2, -1, -1, 0).
  const std::vector<Edge> hub = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 0}, {2, 0}};
  auto hg = std::make_shared<const Digraph>(4, hub);
  auto hs = init_balancer(hg);
  const auto part = level_partition(hs, *hg);
  CHECK(part.v_minus == std::vector<NodeId>{1, 2});
  REQUIRE(part.levels.size() == 2);
  CHECK(part.levels[0] == std::vector<NodeId>{0});  // 0 -> 1
  CHECK(part.levels[1] == std::vector<NodeId>{3});  // 3 -> 0 -> 1

  // Same signs measured on the complete digraph: all of V+ is one hop away.
  auto k4 = testing::random_graph(4, 1.0, 0);
  const auto flat = level_partition(hs, *k4);
  REQUIRE(flat.levels.size() == 1);
  CHECK(flat.levels[0] == std::vector<NodeId>{0, 3});
}

TEST_CASE("potential on the fixture") {
  auto g = testing::three_node();
  auto s = init_balancer(g);
  CHECK(potential_U(s, level_partition(s, *g)) == 2);
}

TEST_CASE("potential with a clipped digit and a zero digit") {
  const std::vector<Edge> hub = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 0}, {2, 0}};
  auto g = std::make_shared<const Digraph>(4, hub);
  auto s = init_balancer(g);
  // V_1 = {0}: min{2, d_0^+ = 1} = 1.  V_2 = {3}: min{0, 1} = 0.  u_2 = 1 + 1.
  CHECK(potential_U(s, level_partition(s, *g)) == 2 * 1 + 1 * 0);
}

TEST_CASE("potential is zero when every layered balance is zero") {
  auto g = testing::three_node();
  auto s = init_balancer(g);  // b = (-1, 0, 1)
  LevelPartition part;
  part.v_minus = {0};
  part.v_plus = {1};
  part.levels = {{1}};
  CHECK(potential_U(s, part) == 0);
}

TEST_CASE("potential is undefined without negative balances") {
  auto balanced = init_balancer(testing::ring(5));
  CHECK_THROWS_AS(potential_U(balanced, level_partition(balanced, balanced.graph())),
                  std::domain_error);
}

TEST_CASE("potential ceiling") {
  CHECK(potential_ceiling(6) == BigInt(2176782336LL));
  CHECK(potential_ceiling(3) == 729);
}

TEST_CASE("mse and squared deviation") {
  const std::vector<double> flat(5, 0.3);
  CHECK(mse(flat, 0.3) == 0.0);
  const std::vector<double> two = {0.0, 1.0};
  CHECK(mse(two, 0.5) == 0.25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> y(7);
    for (double& v : y) v = u(rng);
    const double bar = u(rng);
    double norm = 0.0;
    for (double v : y) norm += (v - bar) * (v - bar);
    CHECK(std::abs(mse(y, bar) * 7 - norm) <= 1e-12);
    CHECK(std::abs(squared_deviation(y, bar) - norm) <= 1e-12);
  }
}

TEST_CASE("rate statistic") {
  std::vector<RoundRecord> traj;
  BalanceRunOptions opts;
  opts.tol.reset();
  opts.max_iters = 20;
  run_balancer(init_balancer(testing::three_node()), opts,
               [&](const RoundRecord& r) { traj.push_back(r); });
  CHECK(rate_statistic(traj, 1) == Dyadic{0, 0});
  CHECK(rate_statistic(traj, 1).to_double() == 0.0);

  std::vector<RoundRecord> synthetic(4);
  for (Round k = 0; k < 4; ++k) synthetic[k].k = k;
  synthetic[0].eps_l1 = {8, 0};
  synthetic[1].eps_l1 = {6, 1};  // 3
  synthetic[2].eps_l1 = {4, 1};  // 2, times k = 4
  synthetic[3].eps_l1 = {0, 2};
  CHECK(rate_statistic(synthetic, 1) == Dyadic{4, 0});
  CHECK(rate_statistic(synthetic, 1, 1) == Dyadic{3, 0});
  CHECK(rate_statistic(synthetic, 3) == Dyadic{0, 0});
  CHECK_THROWS_AS(rate_statistic(synthetic, 0), std::invalid_argument);
}

TEST_CASE("analyzer replays the proof invariants on random runs") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      BalanceRunOptions opts;
      opts.tol.reset();
      opts.max_iters = 2000;
      auto result = run_balancer(init_balancer(testing::random_graph(6, p, seed)), opts);
      CHECK(result.diagnostics.rounds_checked == 2001);
      CHECK(result.diagnostics.max_potential < potential_ceiling(6));
    }
  }
}

TEST_CASE("analyzer rejects out-of-order rounds") {
  auto s = init_balancer(testing::three_node());
  RoundAnalyzer analyzer(s.graph());
  analyzer.analyze(s, compute_signals(s));
  CHECK_THROWS_AS(analyzer.analyze(s, compute_signals(s)), InvariantViolation);
}

TEST_CASE("analyzer flags an imbalance drop without a decreasing event") {
  auto g = testing::three_node();
  auto s = init_balancer(g);
  RoundAnalyzer analyzer(*g);
  // Claim no node fired at round 0, but hand the analyzer the true next state.
  SignalVector silent(3);
  analyzer.analyze(s, silent);
  auto next = step_balancer(s);
  CHECK_THROWS_AS(analyzer.analyze(next, compute_signals(next)), InvariantViolation);
}
