#pragma once

// Partial-sum problems solved through an interval-union backend.
//
// bps_via_diu: the K sequences are concatenated into one sequence of length
// K*B; entry k (1-based) owns the segment [(k-1)p, kp] of [0, K*B*p], and a
// nonzero value v is represented by the single interval [(k-1)p, (k-1)p + v].
// A query masks every entry after j_i in each sequence with one interval,
// so each masked entry contributes exactly p to the union, and the answer is
// the union length mod p.
//
// ps_via_diu: the same idea for one sequence of sqrt(n) numbers in [0, sqrt(n)]
// with blocks of length sqrt(n); the mask length is subtracted exactly.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "errors.hpp"
#include "interval_union.hpp"
#include "modular.hpp"
#include "partial_sum.hpp"
#include "probe_memory.hpp"

namespace probelab {

// Interval operations issued to the inner backend by one outer operation.
struct expansion_counts {
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t queries = 0;
  std::uint64_t interval_ops() const noexcept { return inserts + deletes; }
};

template <interval_union Backend>
class bps_via_diu {
 public:
  bps_via_diu(cell_memory& mem, bank_shape shape)
      : mem_(&mem), shape_(checked(shape)), inner_(mem, universe_of(shape_)) {
    shadow_ = mem.allocate(shape_.K * shape_.B);
  }

  static std::uint64_t universe_of(const bank_shape& s) { return s.K * s.B * s.p; }

  const bank_shape& shape() const noexcept { return shape_; }
  Backend& inner() noexcept { return inner_; }
  const expansion_counts& last_expansion() const noexcept { return last_; }
  // Probes spent reading and writing the old-value table, over the lifetime.
  std::uint64_t shadow_probes() const noexcept { return shadow_probes_; }

  void update(std::span<const std::uint64_t> j, std::span<const std::uint64_t> v) {
    check_shape(j.size());
    check_shape(v.size());
    for (std::uint64_t i = 0; i < shape_.K; ++i) {
      check_index(j[i]);
      if (v[i] >= shape_.p) throw range_error("bps_via_diu: value not in F_p");
    }
    last_ = {};
    for (std::uint64_t i = 0; i < shape_.K; ++i) {
      const std::uint64_t k = i * shape_.B + j[i];  // 1-based position in the long sequence
      const std::uint64_t start = (k - 1) * shape_.p;
      const address cell = shadow_ + (k - 1);
      const std::uint64_t old = mem_->read(cell);
      ++shadow_probes_;
      if (old != 0) {
        inner_.erase(start, start + old);
        ++last_.deletes;
      }
      if (v[i] != 0) {
        inner_.insert(start, start + v[i]);
        ++last_.inserts;
      }
      mem_->write(cell, v[i]);
      ++shadow_probes_;
    }
  }

  std::uint64_t query(std::span<const std::uint64_t> j) {
    check_shape(j.size());
    for (std::uint64_t i = 0; i < shape_.K; ++i) check_index(j[i]);
    last_ = {};
    // Masks [((i-1)B + j_i) p, iBp]; empty ones (j_i = B) are skipped.
    for (std::uint64_t i = 0; i < shape_.K; ++i) {
      const auto [lo, hi] = mask(i, j[i]);
      if (lo < hi) {
        inner_.insert(lo, hi);
        ++last_.inserts;
      }
    }
    const std::uint64_t total = inner_.query();
    ++last_.queries;
    for (std::uint64_t i = 0; i < shape_.K; ++i) {
      const auto [lo, hi] = mask(i, j[i]);
      if (lo < hi) {
        inner_.erase(lo, hi);
        ++last_.deletes;
      }
    }
    return total % shape_.p;
  }

 private:
  static bank_shape checked(bank_shape s) {
    validate_bank_shape(s);
    if (s.B > s.p) throw config_error("bps_via_diu: requires B <= p");
    if (s.K > (~std::uint64_t{0}) / s.B || s.K * s.B > (~std::uint64_t{0}) / s.p)
      throw config_error("bps_via_diu: K*B*p overflows");
    return s;
  }

  std::pair<std::uint64_t, std::uint64_t> mask(std::uint64_t i, std::uint64_t j) const {
    return {(i * shape_.B + j) * shape_.p, (i + 1) * shape_.B * shape_.p};
  }

  void check_shape(std::size_t got) const {
    if (got != shape_.K)
      throw shape_error("bps_via_diu: vector length " + std::to_string(got) + ", expected K=" +
                        std::to_string(shape_.K));
  }

  void check_index(std::uint64_t j) const {
    if (j < 1 || j > shape_.B) throw range_error("bps_via_diu: index " + std::to_string(j) + " out of range");
  }

  cell_memory* mem_;
  bank_shape shape_;
  Backend inner_;
  address shadow_ = 0;
  expansion_counts last_;
  std::uint64_t shadow_probes_ = 0;
};

inline std::uint64_t exact_sqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

template <interval_union Backend>
class ps_via_diu {
 public:
  ps_via_diu(cell_memory& mem, std::uint64_t n) : mem_(&mem), side_(checked_side(n)), inner_(mem, n) {
    shadow_ = mem.allocate(side_);
  }

  std::uint64_t length() const noexcept { return side_; }
  Backend& inner() noexcept { return inner_; }
  const expansion_counts& last_expansion() const noexcept { return last_; }

  void update(std::uint64_t i, std::uint64_t v) {
    if (i < 1 || i > side_) throw range_error("ps_via_diu: index out of range");
    if (v > side_) throw range_error("ps_via_diu: value exceeds block length");
    last_ = {};
    const std::uint64_t start = (i - 1) * side_;
    const std::uint64_t old = mem_->read(shadow_ + (i - 1));
    if (old != 0) {
      inner_.erase(start, start + old);
      ++last_.deletes;
    }
    if (v != 0) {
      inner_.insert(start, start + v);
      ++last_.inserts;
    }
    mem_->write(shadow_ + (i - 1), v);
  }

  std::uint64_t query(std::uint64_t l) {
    if (l < 1 || l > side_) throw range_error("ps_via_diu: index out of range");
    last_ = {};
    const std::uint64_t n = side_ * side_;
    const std::uint64_t lo = l * side_;
    if (lo < n) {
      inner_.insert(lo, n);
      ++last_.inserts;
    }
    const std::uint64_t total = inner_.query();
    ++last_.queries;
    if (lo < n) {
      inner_.erase(lo, n);
      ++last_.deletes;
    }
    return total - (n - lo);
  }

 private:
  static std::uint64_t checked_side(std::uint64_t n) {
    const std::uint64_t r = exact_sqrt(n);
    if (r * r != n || r == 0) throw config_error("ps_via_diu: n=" + std::to_string(n) + " is not a perfect square");
    return r;
  }

  cell_memory* mem_;
  std::uint64_t side_;
  Backend inner_;
  address shadow_ = 0;
  expansion_counts last_;
};

}  // namespace probelab
