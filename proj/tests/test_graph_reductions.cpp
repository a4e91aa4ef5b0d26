#include <gtest/gtest.h>

#include "probelab.hpp"

using namespace probelab;

namespace {

std::uint64_t union_length(std::uint64_t n, const interval_multiset& m) {
  std::vector<bool> covered(n, false);
  for (const auto& [iv, count] : m)
    for (auto k = iv.a; k < iv.b; ++k) covered[k] = true;
  return static_cast<std::uint64_t>(std::count(covered.begin(), covered.end(), true));
}

// #SCC by transitive closure: vertices u, v share a component iff each
// reaches the other.
std::uint64_t scc_by_closure(std::uint64_t n, const interval_multiset& m) {
  const std::uint64_t V = n + 1;
  std::vector<std::vector<bool>> reach(V, std::vector<bool>(V, false));
  for (std::uint64_t v = 0; v < V; ++v) reach[v][v] = true;
  for (std::uint64_t i = 0; i < n; ++i) reach[i][i + 1] = true;
  for (const auto& [iv, c] : m) reach[iv.b][iv.a] = true;
  for (std::uint64_t k = 0; k < V; ++k)
    for (std::uint64_t i = 0; i < V; ++i)
      if (reach[i][k])
        for (std::uint64_t j = 0; j < V; ++j)
          if (reach[k][j]) reach[i][j] = true;
  std::uint64_t comps = 0;
  std::vector<bool> done(V, false);
  for (std::uint64_t v = 0; v < V; ++v) {
    if (done[v]) continue;
    ++comps;
    for (std::uint64_t u = 0; u < V; ++u)
      if (reach[v][u] && reach[u][v]) done[u] = true;
  }
  return comps;
}

// dist(s, t) by Bellman-Ford over the path graph with shortcuts.
std::uint64_t distance_by_relaxation(std::uint64_t n, const interval_multiset& m) {
  std::vector<std::uint64_t> d(n + 1, n + 1);
  d[0] = 0;
  for (std::uint64_t round = 0; round <= n + 1; ++round) {
    for (std::uint64_t i = 0; i < n; ++i) {
      d[i + 1] = std::min(d[i + 1], d[i] + 1);
      d[i] = std::min(d[i], d[i + 1]);
    }
    for (const auto& [iv, c] : m) d[iv.b] = std::min(d[iv.b], d[iv.a]);
  }
  return d[n];
}

template <class Backend>
void fuzz_backend(std::uint64_t seed, int trials) {
  splitmix64 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t n = rng.between(1, 32);
    Backend g(n);
    interval_multiset shadow;
    std::vector<interval> live;
    for (int step = 0; step < 40; ++step) {
      if (live.empty() || rng.below(3) != 0) {
        auto a = rng.between(0, n), b = rng.between(0, n);
        if (a > b) std::swap(a, b);
        g.insert(a, b);
        ++shadow[{a, b}];
        live.push_back({a, b});
      } else {
        const auto i = rng.below(live.size());
        g.erase(live[i].a, live[i].b);
        if (--shadow[live[i]] == 0) shadow.erase(live[i]);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
      }
      ASSERT_EQ(g.edges(), Backend::reference_edges(n, shadow));
      ASSERT_EQ(g.query(), union_length(n, shadow));
    }
  }
}

}  // namespace

TEST(SccUnion, Examples) {
  scc_union g(3);
  EXPECT_EQ(g.query(), 0u);
  EXPECT_EQ(g.components(), 4u);
  g.insert(0, 2);
  EXPECT_EQ(g.components(), 2u);
  EXPECT_EQ(g.query(), 2u);
  scc_union full(5);
  full.insert(0, 5);
  EXPECT_EQ(full.components(), 1u);
  EXPECT_EQ(full.query(), 5u);
  EXPECT_THROW(full.erase(0, 4), precondition_error);
}

TEST(SccUnion, ComponentsMatchTransitiveClosure) {
  splitmix64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = rng.between(1, 20);
    scc_union g(n);
    interval_multiset m;
    for (auto k = rng.below(8); k > 0; --k) {
      auto a = rng.between(0, n), b = rng.between(0, n);
      if (a > b) std::swap(a, b);
      g.insert(a, b);
      ++m[{a, b}];
    }
    ASSERT_EQ(g.components(), scc_by_closure(n, m));
  }
}

TEST(ShortestPathUnion, Examples) {
  shortest_path_union g(2);
  g.insert(0, 2);
  EXPECT_EQ(g.distance(), 0u);
  EXPECT_EQ(g.query(), 2u);
  shortest_path_union empty(7);
  EXPECT_EQ(empty.distance(), 7u);
  EXPECT_EQ(empty.query(), 0u);
  shortest_path_union mid(3);
  mid.insert(1, 2);
  EXPECT_EQ(mid.distance(), 2u);
  EXPECT_EQ(mid.query(), 1u);
}

TEST(ShortestPathUnion, DistanceMatchesRelaxation) {
  splitmix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = rng.between(1, 25);
    shortest_path_union g(n);
    interval_multiset m;
    for (auto k = rng.below(6); k > 0; --k) {
      auto a = rng.between(0, n), b = rng.between(0, n);
      if (a > b) std::swap(a, b);
      g.insert(a, b);
      ++m[{a, b}];
    }
    ASSERT_EQ(g.distance(), distance_by_relaxation(n, m));
  }
}

TEST(MincostFlowUnion, Examples) {
  mincost_flow_union g(2);
  g.insert(0, 2);
  EXPECT_EQ(g.min_cost(), -2);
  EXPECT_EQ(g.query(), 2u);
  mincost_flow_union empty(4);
  EXPECT_EQ(empty.flow_value(), 0u);
  EXPECT_EQ(empty.min_cost(), 0);
  mincost_flow_union twice(3);
  twice.insert(0, 1);
  twice.insert(0, 1);
  EXPECT_EQ(twice.flow_value(), 2u);
  EXPECT_EQ(twice.min_cost(), -1);
  EXPECT_EQ(twice.query(), 1u);
}

TEST(GraphBackends, FuzzScc) { fuzz_backend<scc_union>(101, 100); }
TEST(GraphBackends, FuzzShortestPath) { fuzz_backend<shortest_path_union>(102, 100); }
TEST(GraphBackends, FuzzMincostFlow) { fuzz_backend<mincost_flow_union>(103, 100); }

TEST(GraphBackends, RuntimeFactory) {
  cell_memory mem;
  for (auto name : interval_backend_names) {
    auto ds = make_interval_union(name, mem, 9);
    ds->insert(1, 4);
    ds->insert(3, 6);
    EXPECT_EQ(ds->query(), 5u) << name;
    ds->erase(1, 4);
    EXPECT_EQ(ds->query(), 3u) << name;
  }
  EXPECT_THROW(make_interval_union("treap", mem, 9), config_error);
}
