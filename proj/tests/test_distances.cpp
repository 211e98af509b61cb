#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "rgdist/distances.hpp"

using namespace rgdist;

namespace {

SparseGraph path3() { return SparseGraph(3, {{0, 1}, {1, 2}}); }

SparseGraph complete(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return SparseGraph(n, e);
}

// Single-source BFS; the oracle for the bidirectional search.
std::vector<std::uint32_t> naive_bfs(const SparseGraph& g, std::size_t src) {
  std::vector<std::uint32_t> d(g.size(), kInfiniteDistance);
  std::deque<std::size_t> q{src};
  d[src] = 0;
  while (!q.empty()) {
    const auto x = q.front();
    q.pop_front();
    for (auto y : g.neighbors(x))
      if (d[y] == kInfiniteDistance) {
        d[y] = d[x] + 1;
        q.push_back(y);
      }
  }
  return d;
}

HopcountSample fake_sample(std::vector<std::pair<std::uint32_t, std::optional<std::uint32_t>>> v) {
  HopcountSample s;
  for (auto [graph, d] : v) {
    HopcountEntry e;
    e.graph = graph;
    if (d) {
      e.distance.status = DistanceStatus::finite;
      e.distance.hops = *d;
    }
    s.entries.push_back(e);
  }
  return s;
}

}  // namespace

TEST_CASE("bfs distance") {
  CHECK(bfs_distance(path3(), 0, 2, 10).hops == 2);
  CHECK(bfs_distance(path3(), 2, 0, 10).finite());

  const auto iso = bfs_distance(SparseGraph(2, {}), 0, 1, 10);
  CHECK(iso.status == DistanceStatus::disconnected);
  CHECK(iso.exceeds(1000));

  const auto k4 = complete(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) CHECK(bfs_distance(k4, i, j, 5).hops == 1);

  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i + 1 < 30; ++i) e.emplace_back(i, i + 1);
  const SparseGraph line(30, e);
  CHECK(bfs_distance(line, 0, 29, 29).hops == 29);
  CHECK(bfs_distance(line, 0, 29, 28).status == DistanceStatus::censored);
  CHECK(bfs_distance(line, 0, 29, 28).exceeds(5));

  CHECK_THROWS_AS(bfs_distance(line, 3, 3, 10), std::domain_error);
  CHECK_THROWS_AS(bfs_distance(line, 3, 30, 10), std::out_of_range);
}

TEST_CASE("bidirectional search matches single-source bfs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto seq = iid_capacities(SurvivalModel::pareto(3.5, 0.4), 400, seed);
    const auto g = generate_prg(seq, seed);
    BfsWorkspace ws(g.size());
    std::mt19937_64 eng(seed);
    std::uniform_int_distribution<std::size_t> node(0, g.size() - 1);
    for (int k = 0; k < 20; ++k) {
      const auto a = node(eng);
      const auto ref = naive_bfs(g, a);
      for (std::size_t b = 0; b < g.size(); ++b) {
        if (b == a) continue;
        const auto d = ws.distance(g, a, b, 1000);
        if (ref[b] == kInfiniteDistance) {
          CHECK(d.status == DistanceStatus::disconnected);
        } else {
          REQUIRE(d.finite());
          CHECK(d.hops == ref[b]);
          // Symmetry.
          CHECK(ws.distance(g, b, a, 1000).hops == d.hops);
          // A cap one below the distance censors it.
          if (d.hops > 1) CHECK(ws.distance(g, a, b, d.hops - 1).status == DistanceStatus::censored);
        }
      }
    }
  }
}

TEST_CASE("triangle inequality") {
  const auto seq = deterministic_capacities(SurvivalModel::figure1(), 300);
  const auto g = generate_prg(seq, 21);
  BfsWorkspace ws;
  std::mt19937_64 eng(2);
  std::uniform_int_distribution<std::size_t> node(0, 299);
  for (int k = 0; k < 500; ++k) {
    const auto a = node(eng), b = node(eng), c = node(eng);
    if (a == b || b == c || a == c) continue;
    const auto ab = ws.distance(g, a, b, 100), bc = ws.distance(g, b, c, 100),
               ac = ws.distance(g, a, c, 100);
    if (ab.finite() && bc.finite()) {
      REQUIRE(ac.finite());
      CHECK(ac.hops <= ab.hops + bc.hops);
    }
  }
}

TEST_CASE("shells") {
  const CapacitySequence seq({1.0, 2.0, 3.0});
  const auto s = shells(path3(), 0, 3, seq);
  CHECK(s.shells.size() == 4);
  CHECK(s.shells[0] == std::vector<NodeId>{0});
  CHECK(s.shells[1] == std::vector<NodeId>{1});
  CHECK(s.shells[2] == std::vector<NodeId>{2});
  CHECK(s.shells[3].empty());
  CHECK(s.shell_capacities == std::vector<double>{1.0, 2.0, 3.0, 0.0});
  CHECK(s.sizes() == std::vector<std::uint64_t>{1, 1, 1, 0});

  const SparseGraph star(5, {{2, 0}, {2, 1}, {2, 3}, {2, 4}});
  const auto st = shells(star, 2, 2, CapacitySequence(std::vector<double>(5, 1.0)));
  CHECK(st.shells[1] == std::vector<NodeId>{0, 1, 3, 4});
  CHECK(st.shells[2].empty());
  CHECK_THROWS_AS(shells(star, 5, 1, CapacitySequence(std::vector<double>(5, 1.0))),
                  std::out_of_range);
}

TEST_CASE("sample hopcounts") {
  SUBCASE("complete graph") {
    HopcountOptions opt;
    opt.graphs = 3;
    opt.pairs_per_graph = 12;
    opt.seed = 1;
    const auto s = sample_hopcounts([](std::size_t) { return complete(4); }, opt);
    REQUIRE(s.entries.size() == 36);
    for (const auto& e : s.entries) CHECK(e.distance.hops == 1);
    // All 12 ordered pairs appear once per graph.
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t k = 0; k < 12; ++k) seen.insert({s.entries[k].a1, s.entries[k].a2});
    CHECK(seen.size() == 12);
    opt.pairs_per_graph = 13;
    CHECK_THROWS_AS(sample_hopcounts([](std::size_t) { return complete(4); }, opt),
                    std::invalid_argument);
  }
  SUBCASE("empty graph") {
    HopcountOptions opt;
    opt.graphs = 2;
    opt.pairs_per_graph = 50;
    const auto s = sample_hopcounts([](std::size_t) { return SparseGraph(40, {}); }, opt);
    for (const auto& e : s.entries) CHECK(e.distance.status == DistanceStatus::disconnected);
    const auto surv = survival(s);
    CHECK(surv.infinite_count() == 100);
    CHECK(surv.survival(1000) == 1.0);
    CHECK_FALSE(surv.conditional_survival(1).has_value());
    CHECK_THROWS_AS(surv.curve(3, true), std::domain_error);
  }
  SUBCASE("pairs are distinct within a replicate") {
    HopcountOptions opt;
    opt.graphs = 2;
    opt.pairs_per_graph = 300;
    opt.seed = 4;
    const auto s = sample_hopcounts([](std::size_t) { return SparseGraph(30, {}); }, opt);
    for (std::uint32_t r = 0; r < 2; ++r) {
      std::set<std::pair<NodeId, NodeId>> seen;
      for (const auto& e : s.entries)
        if (e.graph == r) {
          CHECK(e.a1 != e.a2);
          seen.insert({e.a1, e.a2});
        }
      CHECK(seen.size() == 300);
    }
  }
  SUBCASE("erdos-renyi sanity bracket and thread independence") {
    const std::size_t n = 10000;
    const CapacitySequence seq(std::vector<double>(n, 2.0));
    HopcountOptions opt;
    opt.graphs = 4;
    opt.pairs_per_graph = 250;
    opt.seed = 8;
    opt.nu = 2.0;
    auto factory = [&](std::size_t r) {
      return generate_bernoulli(seq, ConnectionKernel::expected_degree(), 1000 + r);
    };
    const auto s = sample_hopcounts(factory, opt);
    double sum = 0.0;
    std::size_t fin = 0;
    for (const auto& e : s.entries)
      if (e.distance.finite()) {
        sum += e.distance.hops;
        ++fin;
      }
    REQUIRE(fin > 100);
    const double target = std::log(static_cast<double>(n)) / std::log(2.0);
    CHECK(sum / fin >= 0.8 * target);
    CHECK(sum / fin <= 1.2 * target);

    opt.threads = 4;
    const auto s4 = sample_hopcounts(factory, opt);
    REQUIRE(s4.entries.size() == s.entries.size());
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      CHECK(s4.entries[k].a1 == s.entries[k].a1);
      CHECK(s4.entries[k].a2 == s.entries[k].a2);
      CHECK(s4.entries[k].distance == s.entries[k].distance);
    }
  }
}

TEST_CASE("default cap") {
  // ⌈log_2 1000⌉ = 10.
  CHECK(default_cap(1000, 2.0) == 50);
}

TEST_CASE("sigma and a") {
  const double nu = 2.231381;
  const auto s = sigma_a(5000, nu);
  CHECK(s.sigma == 10);
  CHECK(s.a == doctest::Approx(-0.6117).epsilon(1e-3));
  const auto exact = sigma_a(std::pow(2.0, 12), 2.0);
  CHECK(exact.sigma == 12);
  CHECK(exact.a == 0.0);
  CHECK(sigma_a(617181, nu).sigma == 16);
  CHECK_THROWS_AS(sigma_a(100, 1.0), std::domain_error);
  CHECK_THROWS_AS(sigma_a(1, 2.0), std::domain_error);
}

TEST_CASE("ladder") {
  const auto l = ladder(5000, 2.231381, 3);
  CHECK(l == std::vector<std::uint64_t>{5000, 24895, 123955, 617181});
  // a_N barely moves along the ladder.
  CHECK(ladder_a_spread(l, 2.231381) < 1e-4);
  CHECK_THROWS_AS(ladder(5000, 1e10, 1000), std::range_error);
  CHECK_THROWS_AS(ladder(5000, 0.9, 1), std::domain_error);
}

TEST_CASE("empirical survival") {
  SUBCASE("all distances 3") {
    const auto s = survival(fake_sample({{0, 3}, {0, 3}, {1, 3}}));
    CHECK(s.survival(2) == 1.0);
    CHECK(s.survival(3) == 0.0);
  }
  SUBCASE("half 1, half infinite") {
    const auto s = survival(fake_sample({{0, 1}, {0, std::nullopt}, {1, 1}, {1, std::nullopt}}));
    CHECK(*s.conditional_survival(1) == 0.0);
    CHECK(*s.conditional_survival(0) == 1.0);
    for (std::uint32_t t = 1; t < 5; ++t) CHECK(s.survival(t) == 0.5);
    const auto rows = s.curve(3, false);
    CHECK(rows.size() == 4);
    CHECK(rows[2].survival == 0.5);
    CHECK(rows[2].n_finite == 2);
    CHECK(rows[2].n_total == 4);
  }
  SUBCASE("clustered standard error") {
    // Two clusters with survival indicators (1,1) and (0,0) at t = 2:
    // p = 1/2, residuals ±1, se = sqrt(2 * 2) / 4.
    const auto s = survival(fake_sample({{0, 3}, {0, 4}, {1, 1}, {1, 2}}));
    CHECK(s.clustered_se(2, true) == doctest::Approx(0.5));
    CHECK(s.binomial_se(2, true) == doctest::Approx(0.25));
  }
  SUBCASE("monotone on random samples") {
    std::mt19937_64 g(6);
    std::uniform_int_distribution<int> d(0, 12);
    std::vector<std::pair<std::uint32_t, std::optional<std::uint32_t>>> v;
    for (int k = 0; k < 500; ++k) {
      const int x = d(g);
      v.push_back({static_cast<std::uint32_t>(k % 7),
                   x == 12 ? std::nullopt : std::optional<std::uint32_t>(x)});
    }
    const auto s = survival(fake_sample(v));
    const auto rows = s.curve(14, true);
    for (std::size_t t = 1; t < rows.size(); ++t) {
      CHECK(rows[t].survival <= rows[t - 1].survival);
      CHECK(s.survival(t) <= s.survival(t - 1));
    }
  }
  SUBCASE("csv") {
    const auto s = survival(fake_sample({{0, 1}, {0, 2}}));
    std::ostringstream out;
    write_survival_csv(out, s.curve(2, true));
    CHECK(out.str().rfind("t,survival,se,n_finite,n_total\n0,1,", 0) == 0);
  }
}

TEST_CASE("shifted deviation") {
  // b is a shifted by two hops exactly.
  const auto a = survival(fake_sample({{0, 3}, {0, 4}, {1, 5}, {1, 5}}));
  const auto b = survival(fake_sample({{0, 5}, {0, 6}, {1, 7}, {1, 7}}));
  CHECK(shifted_deviation(a, b, 2) == 0.0);
  // Unshifted, at t = 5: S_a = 0 and S_b = 0.75.
  CHECK(shifted_deviation(a, b, 0) == doctest::Approx(0.75));
  CHECK(shifted_deviation(a, b, 1) == doctest::Approx(0.5));
  const auto inf = survival(fake_sample({{0, std::nullopt}}));
  CHECK_THROWS_AS(shifted_deviation(a, inf, 0), std::domain_error);
}
