#pragma once

// Interval union answered by dynamic graph problems. Each backend keeps a
// graph that is a fixed function of the current interval multiset and
// recomputes its query from scratch:
//
//   scc_union           - path 0 -> 1 -> ... -> n plus an edge b -> a per
//                         interval; union = (n + 1) - #SCC.
//   shortest_path_union - s -> 0 and n -> t (weight 0), i -> i+1 (weight 1),
//                         i+1 -> i (weight 0), a -> b (weight 0) per interval;
//                         every uncovered unit segment costs exactly 1 on the
//                         best s-t path, so union = n - dist(s, t).
//   mincost_flow_union  - i -> i+1 (cap inf, cost 0), gadget i -> i' -> i+1
//                         (cap 1, cost -1 then 0), s -> i with capacity equal
//                         to the number of left endpoints at i and i -> t
//                         with the number of right endpoints; the min-cost
//                         flow of value |I| costs -union.
//
// These graph solvers are deliberately naive: they certify the constructions
// on small universes.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "interval_union.hpp"

namespace probelab {

struct graph_edge {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  std::int64_t weight = 0;  // weight / cost
  std::uint64_t capacity = 0;
  std::uint64_t multiplicity = 1;
  friend auto operator<=>(const graph_edge&, const graph_edge&) = default;
};

using interval_multiset = std::map<interval, std::uint64_t>;

namespace detail {

inline void multiset_add(interval_multiset& m, std::uint64_t a, std::uint64_t b) { ++m[{a, b}]; }

inline void multiset_remove(interval_multiset& m, std::uint64_t a, std::uint64_t b) {
  auto it = m.find({a, b});
  if (it == m.end())
    throw precondition_error("delete of absent interval [" + std::to_string(a) + "," + std::to_string(b) + "]");
  if (--it->second == 0) m.erase(it);
}

// Iterative Tarjan; returns the number of strongly connected components.
inline std::uint64_t count_sccs(const std::vector<std::vector<std::uint64_t>>& adj) {
  const std::uint64_t n = adj.size();
  constexpr std::uint64_t unvisited = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint64_t> stack;
  std::vector<std::pair<std::uint64_t, std::size_t>> call;
  std::uint64_t next_index = 0, components = 0;

  for (std::uint64_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < adj[v].size()) {
        const std::uint64_t w = adj[v][edge++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint64_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        ++components;
        for (;;) {
          const std::uint64_t x = stack.back();
          stack.pop_back();
          on_stack[x] = 0;
          if (x == done) break;
        }
      }
    }
  }
  return components;
}

}  // namespace detail

class scc_union {
 public:
  explicit scc_union(std::uint64_t n) : n_(n) {}

  std::uint64_t universe() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return n_ + 1; }

  void insert(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_add(intervals_, a, b);
    ++back_edges_[{b, a}];
  }

  void erase(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_remove(intervals_, a, b);
    auto it = back_edges_.find({b, a});
    if (--it->second == 0) back_edges_.erase(it);
  }

  std::uint64_t components() const {
    std::vector<std::vector<std::uint64_t>> adj(n_ + 1);
    for (std::uint64_t i = 0; i < n_; ++i) adj[i].push_back(i + 1);
    for (const auto& [e, count] : back_edges_) adj[e.first].push_back(e.second);
    return detail::count_sccs(adj);
  }

  std::uint64_t query() const { return n_ + 1 - components(); }

  std::vector<graph_edge> edges() const {
    std::vector<graph_edge> out;
    for (std::uint64_t i = 0; i < n_; ++i) out.push_back({i, i + 1, 0, 0, 1});
    for (const auto& [e, count] : back_edges_) out.push_back({e.first, e.second, 0, 0, count});
    std::sort(out.begin(), out.end());
    return out;
  }

  // The construction applied to `m` from scratch.
  static std::vector<graph_edge> reference_edges(std::uint64_t n, const interval_multiset& m) {
    std::vector<graph_edge> out;
    for (std::uint64_t i = 0; i + 1 <= n; ++i) out.push_back({i, i + 1, 0, 0, 1});
    for (const auto& [iv, count] : m) out.push_back({iv.b, iv.a, 0, 0, count});
    std::sort(out.begin(), out.end());
    return out;
  }

  const interval_multiset& intervals() const noexcept { return intervals_; }

 private:
  std::uint64_t n_;
  interval_multiset intervals_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> back_edges_;
};

class shortest_path_union {
 public:
  explicit shortest_path_union(std::uint64_t n) : n_(n) {}

  std::uint64_t universe() const noexcept { return n_; }
  std::uint64_t source() const noexcept { return n_ + 1; }
  std::uint64_t target() const noexcept { return n_ + 2; }

  void insert(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_add(intervals_, a, b);
    ++shortcuts_[{a, b}];
  }

  void erase(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_remove(intervals_, a, b);
    auto it = shortcuts_.find({a, b});
    if (--it->second == 0) shortcuts_.erase(it);
  }

  // Label-setting pass over nonnegative weights.
  std::uint64_t distance() const {
    const std::uint64_t vertices = n_ + 3;
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> adj(vertices);
    adj[source()].push_back({0, 0});
    adj[n_].push_back({target(), 0});
    for (std::uint64_t i = 0; i < n_; ++i) {
      adj[i].push_back({i + 1, 1});
      adj[i + 1].push_back({i, 0});
    }
    for (const auto& [e, count] : shortcuts_) adj[e.first].push_back({e.second, 0});

    constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> dist(vertices, inf);
    using item = std::pair<std::uint64_t, std::uint64_t>;
    std::priority_queue<item, std::vector<item>, std::greater<>> pq;
    dist[source()] = 0;
    pq.push({0, source()});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d != dist[v]) continue;
      for (auto [w, cost] : adj[v]) {
        if (d + cost < dist[w]) {
          dist[w] = d + cost;
          pq.push({dist[w], w});
        }
      }
    }
    if (dist[target()] == inf) throw invariant_violation("shortest_path_union: t unreachable");
    return dist[target()];
  }

  std::uint64_t query() const { return n_ - distance(); }

  std::vector<graph_edge> edges() const {
    std::vector<graph_edge> out;
    out.push_back({source(), 0, 0, 0, 1});
    out.push_back({n_, target(), 0, 0, 1});
    for (std::uint64_t i = 0; i < n_; ++i) {
      out.push_back({i, i + 1, 1, 0, 1});
      out.push_back({i + 1, i, 0, 0, 1});
    }
    for (const auto& [e, count] : shortcuts_) out.push_back({e.first, e.second, 0, 0, count});
    std::sort(out.begin(), out.end());
    return out;
  }

  static std::vector<graph_edge> reference_edges(std::uint64_t n, const interval_multiset& m) {
    std::vector<graph_edge> out{{n + 1, 0, 0, 0, 1}, {n, n + 2, 0, 0, 1}};
    for (std::uint64_t i = 0; i < n; ++i) {
      out.push_back({i, i + 1, 1, 0, 1});
      out.push_back({i + 1, i, 0, 0, 1});
    }
    for (const auto& [iv, count] : m) out.push_back({iv.a, iv.b, 0, 0, count});
    std::sort(out.begin(), out.end());
    return out;
  }

  const interval_multiset& intervals() const noexcept { return intervals_; }

 private:
  std::uint64_t n_;
  interval_multiset intervals_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> shortcuts_;
};

class mincost_flow_union {
 public:
  explicit mincost_flow_union(std::uint64_t n) : n_(n), from_source_(n + 1, 0), to_sink_(n + 1, 0) {}

  std::uint64_t universe() const noexcept { return n_; }
  // Vertex ids: i in [0, n]; gadget vertex i' = n + 1 + i; s = 2n + 1; t = 2n + 2.
  std::uint64_t gadget(std::uint64_t i) const noexcept { return n_ + 1 + i; }
  std::uint64_t source() const noexcept { return 2 * n_ + 1; }
  std::uint64_t target() const noexcept { return 2 * n_ + 2; }

  void insert(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_add(intervals_, a, b);
    ++from_source_[a];
    ++to_sink_[b];
    ++flow_value_;
  }

  void erase(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    detail::multiset_remove(intervals_, a, b);
    --from_source_[a];
    --to_sink_[b];
    --flow_value_;
  }

  std::uint64_t flow_value() const noexcept { return flow_value_; }

  // Successive shortest paths with vertex potentials; Dijkstra pops by
  // (distance, vertex id) and relaxes only on strict improvement, so the
  // augmenting paths are deterministic.
  std::int64_t min_cost() const {
    residual r(2 * n_ + 3);
    const auto big = static_cast<std::int64_t>(flow_value_);
    for (std::uint64_t i = 0; i < n_; ++i) {
      r.add(i, i + 1, big, 0);
      r.add(i, gadget(i), 1, -1);
      r.add(gadget(i), i + 1, 1, 0);
    }
    for (std::uint64_t i = 0; i <= n_; ++i) {
      if (from_source_[i]) r.add(source(), i, static_cast<std::int64_t>(from_source_[i]), 0);
      if (to_sink_[i]) r.add(i, target(), static_cast<std::int64_t>(to_sink_[i]), 0);
    }
    return r.solve(source(), target(), big);
  }

  std::uint64_t query() const { return static_cast<std::uint64_t>(-min_cost()); }

  std::vector<graph_edge> edges() const {
    std::vector<graph_edge> out;
    for (std::uint64_t i = 0; i < n_; ++i) {
      out.push_back({i, i + 1, 0, flow_value_, 1});
      out.push_back({i, gadget(i), -1, 1, 1});
      out.push_back({gadget(i), i + 1, 0, 1, 1});
    }
    for (std::uint64_t i = 0; i <= n_; ++i) {
      out.push_back({source(), i, 0, from_source_[i], 1});
      out.push_back({i, target(), 0, to_sink_[i], 1});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static std::vector<graph_edge> reference_edges(std::uint64_t n, const interval_multiset& m) {
    std::vector<std::uint64_t> left(n + 1, 0), right(n + 1, 0);
    std::uint64_t total = 0;
    for (const auto& [iv, count] : m) {
      left[iv.a] += count;
      right[iv.b] += count;
      total += count;
    }
    std::vector<graph_edge> out;
    for (std::uint64_t i = 0; i < n; ++i) {
      out.push_back({i, i + 1, 0, total, 1});
      out.push_back({i, n + 1 + i, -1, 1, 1});
      out.push_back({n + 1 + i, i + 1, 0, 1, 1});
    }
    for (std::uint64_t i = 0; i <= n; ++i) {
      out.push_back({2 * n + 1, i, 0, left[i], 1});
      out.push_back({i, 2 * n + 2, 0, right[i], 1});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  const interval_multiset& intervals() const noexcept { return intervals_; }

 private:
  struct residual {
    struct arc {
      std::uint64_t to;
      std::int64_t cap;
      std::int64_t cost;
      std::size_t rev;
    };

    explicit residual(std::uint64_t vertices) : adj(vertices) {}

    void add(std::uint64_t u, std::uint64_t v, std::int64_t cap, std::int64_t cost) {
      adj[u].push_back({v, cap, cost, adj[v].size()});
      adj[v].push_back({u, 0, -cost, adj[u].size() - 1});
    }

    std::int64_t solve(std::uint64_t s, std::uint64_t t, std::int64_t required) {
      const std::size_t vn = adj.size();
      constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
      // Initial potentials: Bellman-Ford from a virtual source joined to all.
      std::vector<std::int64_t> h(vn, 0);
      for (std::size_t round = 0; round < vn; ++round) {
        bool changed = false;
        for (std::size_t u = 0; u < vn; ++u)
          for (const auto& e : adj[u])
            if (e.cap > 0 && h[u] + e.cost < h[e.to]) {
              h[e.to] = h[u] + e.cost;
              changed = true;
            }
        if (!changed) break;
        if (round + 1 == vn) throw invariant_violation("mincost_flow_union: negative cycle");
      }

      std::int64_t flow = 0, cost = 0;
      std::vector<std::int64_t> dist(vn);
      std::vector<std::pair<std::uint64_t, std::size_t>> parent(vn);
      while (flow < required) {
        std::fill(dist.begin(), dist.end(), inf);
        using item = std::pair<std::int64_t, std::uint64_t>;
        std::priority_queue<item, std::vector<item>, std::greater<>> pq;
        dist[s] = 0;
        pq.push({0, s});
        while (!pq.empty()) {
          auto [d, u] = pq.top();
          pq.pop();
          if (d != dist[u]) continue;
          for (std::size_t k = 0; k < adj[u].size(); ++k) {
            const auto& e = adj[u][k];
            if (e.cap <= 0) continue;
            const std::int64_t nd = d + e.cost + h[u] - h[e.to];
            if (nd < dist[e.to]) {
              dist[e.to] = nd;
              parent[e.to] = {u, k};
              pq.push({nd, e.to});
            }
          }
        }
        if (dist[t] == inf) throw invariant_violation("mincost_flow_union: required flow infeasible");
        for (std::size_t v = 0; v < vn; ++v)
          if (dist[v] < inf) h[v] += dist[v];
        std::int64_t push = required - flow;
        for (std::uint64_t v = t; v != s; v = parent[v].first) {
          const auto& e = adj[parent[v].first][parent[v].second];
          push = std::min(push, e.cap);
        }
        for (std::uint64_t v = t; v != s; v = parent[v].first) {
          auto& e = adj[parent[v].first][parent[v].second];
          e.cap -= push;
          adj[v][e.rev].cap += push;
          cost += push * e.cost;
        }
        flow += push;
      }
      return cost;
    }

    std::vector<std::vector<arc>> adj;
  };

  std::uint64_t n_;
  interval_multiset intervals_;
  std::vector<std::uint64_t> from_source_;
  std::vector<std::uint64_t> to_sink_;
  std::uint64_t flow_value_ = 0;
};

}  // namespace probelab
