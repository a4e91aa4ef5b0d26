#pragma once

// Batch partial sum over F_p: K sequences A[i][1..B]. An update sets one entry
// in every sequence; a query returns sum_i sum_{l <= j_i} A[i][l] mod p.
// Each sequence is a Fenwick tree in cells next to a copy of its raw entries
// (needed to turn an assignment into a Fenwick delta).

#include <cstdint>
#include <span>
#include <string>

#include "errors.hpp"
#include "modular.hpp"
#include "probe_memory.hpp"

namespace probelab {

struct bank_shape {
  std::uint64_t K = 1;
  std::uint64_t B = 1;
  std::uint64_t p = 2;
};

inline void validate_bank_shape(const bank_shape& s) {
  if (s.K < 1 || s.B < 1) throw config_error("bank: K and B must be >= 1");
  if (!is_prime(s.p)) throw config_error("bank: modulus " + std::to_string(s.p) + " is not prime");
  if (s.p >= (std::uint64_t{1} << 62)) throw config_error("bank: modulus too large");
}

class fp_sequence_bank {
 public:
  fp_sequence_bank(cell_memory& mem, bank_shape shape) : mem_(&mem), shape_(shape) {
    validate_bank_shape(shape_);
    if (!mem.fits(shape_.p - 1)) throw config_error("bank: residues do not fit in a cell");
    if (shape_.K > (~std::uint64_t{0}) / shape_.B) throw config_error("bank: K*B overflows");
    values_ = mem.allocate(shape_.K * shape_.B);
    tree_ = mem.allocate(shape_.K * shape_.B);
  }

  const bank_shape& shape() const noexcept { return shape_; }

  void update(std::span<const std::uint64_t> j, std::span<const std::uint64_t> v) {
    check_shape(j.size(), "update j");
    check_shape(v.size(), "update v");
    for (std::uint64_t i = 0; i < shape_.K; ++i) {
      check_index(j[i]);
      if (v[i] >= shape_.p)
        throw range_error("bank: value " + std::to_string(v[i]) + " not in F_" + std::to_string(shape_.p));
    }
    for (std::uint64_t i = 0; i < shape_.K; ++i) assign(i, j[i], v[i]);
  }

  std::uint64_t query(std::span<const std::uint64_t> j) {
    check_shape(j.size(), "query j");
    for (std::uint64_t i = 0; i < shape_.K; ++i) check_index(j[i]);
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < shape_.K; ++i) total = add_mod(total, prefix(i, j[i]), shape_.p);
    return total;
  }

  // Current A[i][j], 1-indexed; one probe.
  std::uint64_t entry(std::uint64_t i, std::uint64_t j) {
    if (i < 1 || i > shape_.K) throw range_error("bank: sequence index out of range");
    check_index(j);
    return mem_->read(values_ + (i - 1) * shape_.B + (j - 1));
  }

 private:
  void check_shape(std::size_t got, const char* what) const {
    if (got != shape_.K)
      throw shape_error(std::string("bank: ") + what + " has length " + std::to_string(got) +
                        ", expected K=" + std::to_string(shape_.K));
  }

  void check_index(std::uint64_t j) const {
    if (j < 1 || j > shape_.B)
      throw range_error("bank: index " + std::to_string(j) + " not in [1," + std::to_string(shape_.B) + "]");
  }

  void assign(std::uint64_t seq, std::uint64_t j, std::uint64_t v) {
    const address at = values_ + seq * shape_.B + (j - 1);
    const std::uint64_t old = mem_->read(at);
    if (old == v) return;
    mem_->write(at, v);
    const std::uint64_t delta = sub_mod(v, old, shape_.p);
    const address row = tree_ + seq * shape_.B;
    for (std::uint64_t x = j; x <= shape_.B; x += x & (~x + 1)) {
      const address cell = row + (x - 1);
      mem_->write(cell, add_mod(mem_->read(cell), delta, shape_.p));
    }
  }

  std::uint64_t prefix(std::uint64_t seq, std::uint64_t j) {
    const address row = tree_ + seq * shape_.B;
    std::uint64_t s = 0;
    for (std::uint64_t x = j; x > 0; x -= x & (~x + 1)) s = add_mod(s, mem_->read(row + (x - 1)), shape_.p);
    return s;
  }

  cell_memory* mem_;
  bank_shape shape_;
  address values_ = 0;
  address tree_ = 0;
};

// Single-sequence partial sum: update(i, v) sets A_i, query(l) = sum_{i<=l} A_i
// mod p.
class partial_sum {
 public:
  partial_sum(cell_memory& mem, std::uint64_t length, std::uint64_t p) : bank_(mem, {1, length, p}) {}

  std::uint64_t length() const noexcept { return bank_.shape().B; }
  std::uint64_t modulus() const noexcept { return bank_.shape().p; }

  void update(std::uint64_t i, std::uint64_t v) {
    const std::uint64_t j[1] = {i};
    const std::uint64_t val[1] = {v};
    bank_.update(j, val);
  }

  std::uint64_t query(std::uint64_t l) {
    const std::uint64_t j[1] = {l};
    return bank_.query(j);
  }

 private:
  fp_sequence_bank bank_;
};

}  // namespace probelab
