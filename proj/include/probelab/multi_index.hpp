#pragma once

// The multi-index problem induced by a hard sequence and a split.
//
// Alice gets x in F_p^{LK}: block k holds the prefix sums of the values that
// I_A wrote into sequence k, taken in increasing entry order (the set E_k).
// Bob gets one vector per query of I_B with at most one 1 per block: block k
// has a 1 at position l = |{e in E_k : e <= j_k}|, or nothing if l = 0. Then
// <x, y_i> is exactly the part of query i's answer that Bob cannot compute
// from what he knows.
//
// y is stored sparsely: y[i][k] in [0, L] is the 1-based position of the 1 in
// block k, with 0 for an all-zero block.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "hard_instances.hpp"
#include "modular.hpp"
#include "operations.hpp"
#include "json.hpp"

namespace probelab {

struct multi_index_instance {
  std::uint64_t p = 2;
  std::uint64_t K = 0;
  std::uint64_t L = 0;
  std::vector<std::uint64_t> x;               // size L*K, block k at [k*L, (k+1)*L)
  std::vector<std::vector<std::uint64_t>> y;  // L vectors of K positions in [0, L]

  std::uint64_t coordinate(std::uint64_t block, std::uint64_t position) const { return block * L + (position - 1); }
};

inline multi_index_instance map_F(const operation_sequence& trace, const dyadic_label& s, std::uint64_t p) {
  const std::uint64_t B = hard_sequence_length(trace);
  const game_split split(s, floor_log2(B));
  const auto [a0, a1] = split.alice_ops();
  const auto [b0, b1] = split.bob_ops();

  multi_index_instance inst;
  inst.p = p;
  inst.K = std::get<bps_update_op>(trace[0]).j.size();
  inst.L = split.tuple_size();
  const std::uint64_t K = inst.K, L = inst.L;

  // E_k with the values written in I_A, sorted by entry.
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> written(K);
  for (std::uint64_t t = a0; t < a1; t += 2) {
    const auto& u = std::get<bps_update_op>(trace[t]);
    if (u.j.size() != K) throw shape_error("map_F: update with the wrong number of sequences");
    for (std::uint64_t k = 0; k < K; ++k) {
      if (u.v[k] >= p) throw range_error("map_F: value not in F_p");
      written[k].emplace_back(u.j[k], u.v[k]);
    }
  }
  inst.x.assign(L * K, 0);
  std::vector<std::vector<std::uint64_t>> entries(K);
  for (std::uint64_t k = 0; k < K; ++k) {
    auto& w = written[k];
    std::sort(w.begin(), w.end());
    if (w.size() != L) throw shape_error("map_F: I_A does not write L entries of every sequence");
    for (std::size_t i = 1; i < w.size(); ++i)
      if (w[i].first == w[i - 1].first) throw shape_error("map_F: an entry is written twice inside I_A");
    std::uint64_t sum = 0;
    for (std::uint64_t l = 0; l < L; ++l) {
      sum = add_mod(sum, w[l].second, p);
      inst.x[k * L + l] = sum;
      entries[k].push_back(w[l].first);
    }
  }

  for (std::uint64_t t = b0 + 1; t < b1; t += 2) {
    const auto& q = std::get<bps_query_op>(trace[t]);
    if (q.j.size() != K) throw shape_error("map_F: query with the wrong number of sequences");
    std::vector<std::uint64_t> yi(K);
    for (std::uint64_t k = 0; k < K; ++k)
      yi[k] = static_cast<std::uint64_t>(std::upper_bound(entries[k].begin(), entries[k].end(), q.j[k]) -
                                         entries[k].begin());
    inst.y.push_back(std::move(yi));
  }
  return inst;
}

inline std::vector<std::uint64_t> eval_f(const multi_index_instance& inst) {
  std::vector<std::uint64_t> out;
  out.reserve(inst.y.size());
  for (const auto& yi : inst.y) {
    std::uint64_t acc = 0;
    for (std::uint64_t k = 0; k < inst.K; ++k)
      if (yi[k] != 0) acc = add_mod(acc, inst.x[inst.coordinate(k, yi[k])], inst.p);
    out.push_back(acc);
  }
  return out;
}

// Bob's view of each query of I_B: the answer over every entry not written in
// I_A, by direct summation over the trace with I_A's updates left out.
inline std::vector<std::uint64_t> bob_known_summands(const operation_sequence& trace, const dyadic_label& s,
                                                     std::uint64_t p) {
  const std::uint64_t B = hard_sequence_length(trace);
  const game_split split(s, floor_log2(B));
  const auto [a0, a1] = split.alice_ops();
  const auto [b0, b1] = split.bob_ops();
  const std::uint64_t K = std::get<bps_update_op>(trace[0]).j.size();
  std::vector<std::vector<std::uint64_t>> A(K, std::vector<std::uint64_t>(B + 1, 0));
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = 0; t < b1; ++t) {
    if (const auto* u = std::get_if<bps_update_op>(&trace[t])) {
      if (t >= a0 && t < a1) continue;
      for (std::uint64_t k = 0; k < K; ++k) A[k][u->j[k]] = u->v[k];
    } else if (t >= b0) {
      const auto& q = std::get<bps_query_op>(trace[t]);
      std::uint64_t acc = 0;
      for (std::uint64_t k = 0; k < K; ++k)
        for (std::uint64_t l = 1; l <= q.j[k]; ++l) acc = add_mod(acc, A[k][l], p);
      out.push_back(acc);
    }
  }
  return out;
}

// No set of at most LK/10 coordinates holds more than 0.9 LK of the ones.
// The heaviest such set is the top floor(LK/10) coordinates by count.
inline bool is_evenly_spreading(const multi_index_instance& inst) {
  const std::uint64_t LK = inst.L * inst.K;
  std::vector<std::uint64_t> count(LK, 0);
  for (const auto& yi : inst.y)
    for (std::uint64_t k = 0; k < inst.K; ++k)
      if (yi[k] != 0) ++count[inst.coordinate(k, yi[k])];
  const std::uint64_t m = LK / 10;
  std::partial_sort(count.begin(), count.begin() + static_cast<std::ptrdiff_t>(m), count.end(), std::greater<>());
  std::uint64_t heaviest = 0;
  for (std::uint64_t i = 0; i < m; ++i) heaviest += count[i];
  return heaviest * 10 <= 9 * LK;
}

inline nlohmann::json to_json(const multi_index_instance& inst) {
  nlohmann::json y = nlohmann::json::array();
  for (const auto& yi : inst.y) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::uint64_t k = 0; k < inst.K; ++k)
      if (yi[k] != 0) pairs.push_back({k, yi[k]});
    y.push_back(std::move(pairs));
  }
  return {{"p", inst.p}, {"K", inst.K}, {"L", inst.L}, {"x", inst.x}, {"y", y}};
}

}  // namespace probelab
