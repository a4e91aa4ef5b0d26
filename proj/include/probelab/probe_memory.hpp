#pragma once

// Cell-probe memory. Every persistent structure in probelab keeps its state
// here between operations; each read or write of a cell is a probe and is
// appended to the probe log tagged with the operation that issued it.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace probelab {

using address = std::uint64_t;
using word = std::uint64_t;

enum class probe_kind : std::uint8_t { read, write };

inline const char* to_string(probe_kind k) { return k == probe_kind::read ? "read" : "write"; }

struct probe_record {
  std::uint64_t op_index;
  probe_kind kind;
  address addr;

  friend bool operator==(const probe_record&, const probe_record&) = default;
};

// Append-only, ordered by execution; op_index never decreases.
class probe_log {
 public:
  void append(const probe_record& r) {
    if (!entries_.empty() && r.op_index < entries_.back().op_index)
      throw invariant_violation("probe_log: op_index went backwards");
    entries_.push_back(r);
    if (r.op_index + 1 > op_count_) op_count_ = r.op_index + 1;
  }

  // Marks operation `op_index` as executed even if it issues no probe.
  void note_op(std::uint64_t op_index) {
    if (op_index + 1 > op_count_) op_count_ = op_index + 1;
  }

  const std::vector<probe_record>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t op_count() const noexcept { return op_count_; }

  // Entries with op_index in [op_begin, op_end), as an index range.
  std::pair<std::size_t, std::size_t> span_of(std::uint64_t op_begin, std::uint64_t op_end) const {
    auto lo = std::lower_bound(entries_.begin(), entries_.end(), op_begin,
                               [](const probe_record& r, std::uint64_t v) { return r.op_index < v; });
    auto hi = std::lower_bound(lo, entries_.end(), op_end,
                               [](const probe_record& r, std::uint64_t v) { return r.op_index < v; });
    return {static_cast<std::size_t>(lo - entries_.begin()),
            static_cast<std::size_t>(hi - entries_.begin())};
  }

  std::size_t probes_in(std::uint64_t op_index) const {
    auto [lo, hi] = span_of(op_index, op_index + 1);
    return hi - lo;
  }

  // probes_per_op()[t] = number of probes issued by operation t.
  std::vector<std::size_t> probes_per_op() const {
    std::vector<std::size_t> out(op_count_, 0);
    for (const auto& r : entries_) ++out[r.op_index];
    return out;
  }

  void clear() {
    entries_.clear();
    op_count_ = 0;
  }

  friend bool operator==(const probe_log& a, const probe_log& b) {
    return a.op_count_ == b.op_count_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<probe_record> entries_;
  std::uint64_t op_count_ = 0;
};

// Distinct addresses probed by operations in [op_begin, op_end), sorted.
inline std::vector<address> probe_set(const probe_log& log, std::uint64_t op_begin,
                                      std::uint64_t op_end) {
  std::vector<address> out;
  if (op_begin >= op_end) return out;
  auto [lo, hi] = log.span_of(op_begin, op_end);
  out.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) out.push_back(log.entries()[i].addr);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// CSV with header op_index,kind,address.
inline void write_probe_log_csv(std::ostream& os, const probe_log& log) {
  os << "op_index,kind,address\n";
  for (const auto& r : log.entries()) os << r.op_index << ',' << to_string(r.kind) << ',' << r.addr << '\n';
}

// Logical copy of the cell contents. Restoring one reproduces every read.
struct snapshot {
  unsigned word_size = 64;
  std::unordered_map<address, word> cells;
};

class cell_memory {
 public:
  // Called before every probe is served; may inspect or poke the memory, or
  // throw to abort the operation.
  using probe_hook = std::function<void(address, probe_kind)>;

  explicit cell_memory(unsigned word_size = 64) : word_size_(word_size) {
    if (word_size_ == 0 || word_size_ > 64)
      throw config_error("cell_memory: word size must be in [1, 64], got " + std::to_string(word_size));
    max_word_ = word_size_ == 64 ? ~word{0} : (word{1} << word_size_) - 1;
  }

  unsigned word_size() const noexcept { return word_size_; }
  word max_word() const noexcept { return max_word_; }
  bool fits(word v) const noexcept { return v <= max_word_; }

  // Reserves `count` consecutive addresses. Layout only; no probes.
  address allocate(std::uint64_t count) {
    if (count > max_word_ || next_free_ > max_word_ - count + 1)
      throw config_error("cell_memory: address space of 2^" + std::to_string(word_size_) +
                         " cells exhausted");
    const address base = next_free_;
    next_free_ += count;
    return base;
  }

  void begin_op(std::uint64_t op_index) {
    if (op_index < current_op_ && started_)
      throw invariant_violation("cell_memory: op_index went backwards");
    current_op_ = op_index;
    started_ = true;
    log_.note_op(op_index);
  }

  std::uint64_t current_op() const noexcept { return current_op_; }

  word read(address a) { return probe_read(a, current_op_); }
  void write(address a, word v) { probe_write(a, v, current_op_); }

  word probe_read(address a, std::uint64_t op_index) {
    check_address(a);
    if (hook_) hook_(a, probe_kind::read);
    log_.append({op_index, probe_kind::read, a});
    auto it = cells_.find(a);
    return it == cells_.end() ? 0 : it->second;
  }

  void probe_write(address a, word v, std::uint64_t op_index) {
    check_address(a);
    if (!fits(v))
      throw encoding_error("cell_memory: word " + std::to_string(v) + " exceeds " +
                           std::to_string(word_size_) + " bits");
    if (hook_) hook_(a, probe_kind::write);
    log_.append({op_index, probe_kind::write, a});
    store(a, v);
  }

  // Unlogged access for harnesses (oracles, protocol simulations). Data
  // structures never call these.
  word peek(address a) const {
    auto it = cells_.find(a);
    return it == cells_.end() ? 0 : it->second;
  }
  void poke(address a, word v) {
    check_address(a);
    if (!fits(v)) throw encoding_error("cell_memory: poke word too wide");
    store(a, v);
  }

  snapshot take_snapshot() const { return snapshot{word_size_, cells_}; }

  void restore(const snapshot& s) {
    if (s.word_size != word_size_) throw config_error("cell_memory: snapshot word size mismatch");
    cells_ = s.cells;
  }

  void set_probe_hook(probe_hook h) { hook_ = std::move(h); }
  void clear_probe_hook() { hook_ = nullptr; }

  const probe_log& log() const noexcept { return log_; }
  probe_log& log() noexcept { return log_; }
  std::size_t stored_cells() const noexcept { return cells_.size(); }

 private:
  void check_address(address a) const {
    if (a > max_word_)
      throw range_error("cell_memory: address " + std::to_string(a) + " outside 2^" +
                        std::to_string(word_size_));
  }

  void store(address a, word v) {
    // Zero is the default content, so zero cells are not materialized.
    if (v == 0)
      cells_.erase(a);
    else
      cells_[a] = v;
  }

  unsigned word_size_;
  word max_word_;
  address next_free_ = 0;
  std::uint64_t current_op_ = 0;
  bool started_ = false;
  std::unordered_map<address, word> cells_;
  probe_log log_;
  probe_hook hook_;
};

}  // namespace probelab
