#pragma once

// Zero-error sparse set disjointness with shared randomness.
//
// The parties take turns as sender, Alice first. The sender announces the
// size m of its live set in unary (m + 1 bits) and then a bucket bitmap of
// length 2 * m * boost under a fresh shared hash; the receiver drops every
// live element whose bucket is empty. A common element is never dropped, so
// the protocol can only stop early on disjoint inputs: a sender with an empty
// live set ends it with "disjoint".
//
// A round that drops nothing doubles boost (the live sets are probably
// intersecting or the hash was unlucky); any progress resets it. Once the
// bitmap would cost more than listing the set, the sender lists its live set
// explicitly (m * universe_bits bits) and the receiver answers with one bit.
// Every transmitted bit is counted.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace probelab {

struct disjointness_result {
  bool disjoint = true;
  std::uint64_t bits_used = 0;
  std::uint64_t rounds = 0;
  bool explicit_closure = false;
};

inline disjointness_result sparse_set_disjointness(std::vector<std::uint64_t> S, std::vector<std::uint64_t> T,
                                                   unsigned universe_bits, splitmix64& shared) {
  if (universe_bits == 0 || universe_bits > 64) throw config_error("disjointness: universe_bits must be in [1, 64]");
  auto normalize = [](std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  normalize(S);
  normalize(T);

  disjointness_result res;
  std::vector<std::uint64_t>* live[2] = {&S, &T};
  std::uint64_t boost = 1;
  for (unsigned turn = 0;; turn ^= 1) {
    auto& sender = *live[turn];
    auto& receiver = *live[turn ^ 1];
    const std::uint64_t m = sender.size();
    ++res.rounds;
    res.bits_used += m + 1;
    if (m == 0) {
      res.disjoint = true;
      return res;
    }

    const std::uint64_t L = 2 * m * boost;
    if (L > m * universe_bits) {
      res.bits_used += m * universe_bits + 1;
      res.explicit_closure = true;
      res.disjoint = std::none_of(receiver.begin(), receiver.end(), [&](std::uint64_t e) {
        return std::binary_search(sender.begin(), sender.end(), e);
      });
      return res;
    }

    const std::uint64_t salt = shared();
    auto bucket = [&](std::uint64_t e) { return splitmix64::mix(e ^ salt) % L; };
    std::vector<bool> bitmap(L, false);
    for (auto e : sender) bitmap[bucket(e)] = true;
    res.bits_used += L;

    const std::size_t before = receiver.size();
    std::erase_if(receiver, [&](std::uint64_t e) { return !bitmap[bucket(e)]; });
    boost = (receiver.size() == before && before > 0) ? boost * 2 : 1;
  }
}

inline disjointness_result sparse_set_disjointness(const std::vector<std::uint64_t>& S,
                                                   const std::vector<std::uint64_t>& T, unsigned universe_bits,
                                                   std::uint64_t seed) {
  splitmix64 shared(seed);
  return sparse_set_disjointness(S, T, universe_bits, shared);
}

}  // namespace probelab
