#pragma once

// Dynamic interval union: a multiset of integer intervals [a, b] over [0, n]
// with insert, erase and a query for the length of the union. Two backends,
// both keeping all state in a cell_memory:
//
//   segment_tree_union  - implicit tree over the n unit segments [k, k+1);
//                         each node holds (cover count, covered length).
//   naive_bitmap_union  - per-unit cover counts plus a w-bit-per-cell bitmap
//                         of covered units; query scans the bitmap.
//
// Both validate erase against a multiplicity ledger that also lives in cells,
// so the ledger probes are part of every reported count.

#include <bit>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "modular.hpp"
#include "probe_memory.hpp"

namespace probelab {

struct interval {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t length() const noexcept { return b - a; }
  friend auto operator<=>(const interval&, const interval&) = default;
};

template <class T>
concept interval_union = requires(T& t, const T& ct, std::uint64_t a, std::uint64_t b) {
  t.insert(a, b);
  t.erase(a, b);
  { t.query() } -> std::convertible_to<std::uint64_t>;
  { ct.universe() } -> std::convertible_to<std::uint64_t>;
};

enum class union_backend { segment_tree, naive_bitmap };

inline const char* to_string(union_backend b) {
  return b == union_backend::segment_tree ? "segment_tree" : "naive_bitmap";
}

inline void check_interval(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  if (a > b || b > n)
    throw range_error("interval [" + std::to_string(a) + "," + std::to_string(b) +
                      "] not within [0," + std::to_string(n) + "]");
}

// Multiplicity of every interval, one cell per (a, b) pair.
class multiplicity_ledger {
 public:
  multiplicity_ledger(cell_memory& mem, std::uint64_t n) : mem_(&mem), side_(n + 1) {
    if (side_ != 0 && side_ > (~std::uint64_t{0}) / side_)
      throw config_error("multiplicity_ledger: universe too large");
    base_ = mem.allocate(side_ * side_);
  }

  void increment(std::uint64_t a, std::uint64_t b) {
    const address at = slot(a, b);
    const word c = mem_->read(at);
    if (c == mem_->max_word()) throw encoding_error("multiplicity_ledger: count overflow");
    mem_->write(at, c + 1);
  }

  void decrement(std::uint64_t a, std::uint64_t b) {
    const address at = slot(a, b);
    const word c = mem_->read(at);
    if (c == 0)
      throw precondition_error("delete of absent interval [" + std::to_string(a) + "," +
                               std::to_string(b) + "]");
    mem_->write(at, c - 1);
  }

 private:
  address slot(std::uint64_t a, std::uint64_t b) const { return base_ + a * side_ + b; }

  cell_memory* mem_;
  std::uint64_t side_;
  address base_ = 0;
};

class segment_tree_union {
 public:
  // Probe budget, asserted by the tests for every operation:
  //   insert/erase <= update_probes_per_level * (ceil(log2 n) + 1) + update_probes_fixed
  //   query        <= query_probes
  // Per tree level an update visits at most two partially covered nodes
  // (load, store, one sibling length read) and two fully covered nodes (load,
  // store, two child length reads): 14 probes packed, 22 with the split
  // two-cell layout. The fixed part is the ledger read and write.
  static constexpr std::uint64_t update_probes_per_level = 22;
  static constexpr std::uint64_t update_probes_fixed = 2;
  static constexpr std::uint64_t query_probes = 1;

  segment_tree_union(cell_memory& mem, std::uint64_t n) : mem_(&mem), n_(n), ledger_(mem, n) {
    leaves_ = std::bit_ceil(n_ == 0 ? std::uint64_t{1} : n_);
    half_ = mem.word_size() / 2;
    // Packed when both fields fit in half a word; the count is bounded by
    // the packing check on every write. Since the ledger needs (n+1)^2
    // cells, the split layout only arises for odd w.
    packed_ = half_ > 0 && half_ < 64 && n_ < (std::uint64_t{1} << half_);
    base_ = mem.allocate((packed_ ? 1 : 2) * 2 * leaves_);
  }

  std::uint64_t universe() const noexcept { return n_; }
  bool packed() const noexcept { return packed_; }

  static std::uint64_t update_probe_bound(std::uint64_t n) {
    return update_probes_per_level * (ceil_log2(n) + 1) + update_probes_fixed;
  }

  void insert(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    ledger_.increment(a, b);
    if (a < b) update(1, 0, leaves_, a, b, +1);
  }

  void erase(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    ledger_.decrement(a, b);
    if (a < b) update(1, 0, leaves_, a, b, -1);
  }

  std::uint64_t query() { return read_length(1); }

 private:
  struct node_value {
    std::uint64_t count = 0;
    std::uint64_t length = 0;
  };

  address count_cell(std::uint64_t node) const { return packed_ ? base_ + node : base_ + 2 * node; }
  address length_cell(std::uint64_t node) const {
    return packed_ ? base_ + node : base_ + 2 * node + 1;
  }

  node_value load(std::uint64_t node) {
    if (packed_) {
      const word v = mem_->read(base_ + node);
      return {v >> half_, v & ((word{1} << half_) - 1)};
    }
    return {mem_->read(count_cell(node)), mem_->read(length_cell(node))};
  }

  std::uint64_t read_length(std::uint64_t node) {
    if (packed_) return mem_->read(base_ + node) & ((word{1} << half_) - 1);
    return mem_->read(length_cell(node));
  }

  void store(std::uint64_t node, node_value v) {
    if (packed_) {
      if (v.count >= (std::uint64_t{1} << half_))
        throw encoding_error("segment_tree_union: cover count exceeds half-word");
      mem_->write(base_ + node, (v.count << half_) | v.length);
      return;
    }
    mem_->write(count_cell(node), v.count);
    mem_->write(length_cell(node), v.length);
  }

  // Applies delta to [a, b) within node [lo, hi); returns the node's new
  // covered length.
  std::uint64_t update(std::uint64_t node, std::uint64_t lo, std::uint64_t hi, std::uint64_t a,
                       std::uint64_t b, int delta) {
    node_value v = load(node);
    const bool leaf = hi - lo == 1;
    if (a <= lo && hi <= b) {
      if (delta < 0) {
        if (v.count == 0) throw invariant_violation("segment_tree_union: cover count underflow");
        --v.count;
      } else {
        ++v.count;
      }
      if (v.count > 0)
        v.length = hi - lo;
      else
        v.length = leaf ? 0 : read_length(2 * node) + read_length(2 * node + 1);
    } else {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      const std::uint64_t left =
          a < mid ? update(2 * node, lo, mid, a, b, delta) : read_length(2 * node);
      const std::uint64_t right =
          b > mid ? update(2 * node + 1, mid, hi, a, b, delta) : read_length(2 * node + 1);
      v.length = v.count > 0 ? hi - lo : left + right;
    }
    store(node, v);
    return v.length;
  }

  cell_memory* mem_;
  std::uint64_t n_;
  multiplicity_ledger ledger_;
  std::uint64_t leaves_ = 1;
  unsigned half_ = 32;
  bool packed_ = true;
  address base_ = 0;
};

class naive_bitmap_union {
 public:
  naive_bitmap_union(cell_memory& mem, std::uint64_t n) : mem_(&mem), n_(n), ledger_(mem, n) {
    bits_ = mem.word_size();
    counts_ = mem.allocate(n_);
    bitmap_ = mem.allocate((n_ + bits_ - 1) / bits_);
  }

  std::uint64_t universe() const noexcept { return n_; }

  void insert(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    ledger_.increment(a, b);
    for (std::uint64_t k = a; k < b; ++k) {
      const word c = mem_->read(counts_ + k);
      if (c == mem_->max_word()) throw encoding_error("naive_bitmap_union: count overflow");
      mem_->write(counts_ + k, c + 1);
      if (c == 0) flip_bit(k);
    }
  }

  void erase(std::uint64_t a, std::uint64_t b) {
    check_interval(a, b, n_);
    ledger_.decrement(a, b);
    for (std::uint64_t k = a; k < b; ++k) {
      const word c = mem_->read(counts_ + k);
      if (c == 0) throw invariant_violation("naive_bitmap_union: count underflow");
      mem_->write(counts_ + k, c - 1);
      if (c == 1) flip_bit(k);
    }
  }

  std::uint64_t query() {
    std::uint64_t total = 0;
    const std::uint64_t cells = (n_ + bits_ - 1) / bits_;
    for (std::uint64_t i = 0; i < cells; ++i) total += std::popcount(mem_->read(bitmap_ + i));
    return total;
  }

 private:
  void flip_bit(std::uint64_t k) {
    const address at = bitmap_ + k / bits_;
    mem_->write(at, mem_->read(at) ^ (word{1} << (k % bits_)));
  }

  cell_memory* mem_;
  std::uint64_t n_;
  multiplicity_ledger ledger_;
  unsigned bits_ = 64;
  address counts_ = 0;
  address bitmap_ = 0;
};

// Operation recorded by recording_union.
struct union_event {
  enum class kind : std::uint8_t { insert, erase, query } what;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  friend bool operator==(const union_event&, const union_event&) = default;
};

// Forwards to an inner backend and records the operation stream. The record is
// instrumentation, not structure state.
template <interval_union Inner>
class recording_union {
 public:
  recording_union(cell_memory& mem, std::uint64_t n) : inner_(mem, n) {}

  std::uint64_t universe() const { return inner_.universe(); }
  void insert(std::uint64_t a, std::uint64_t b) {
    inner_.insert(a, b);
    events_.push_back({union_event::kind::insert, a, b});
  }
  void erase(std::uint64_t a, std::uint64_t b) {
    inner_.erase(a, b);
    events_.push_back({union_event::kind::erase, a, b});
  }
  std::uint64_t query() {
    events_.push_back({union_event::kind::query});
    return inner_.query();
  }

  const std::vector<union_event>& events() const noexcept { return events_; }
  Inner& inner() noexcept { return inner_; }

 private:
  Inner inner_;
  std::vector<union_event> events_;
};

}  // namespace probelab
