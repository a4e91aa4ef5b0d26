#pragma once

// Runtime-selected backends, for harnesses that pick a structure by name.
//
// Interval-union backends: segment_tree and naive_bitmap route all state
// through cells; scc, shortest_path and mincost_flow are the graph encodings
// (plain memory, not instrumented).
//
// Batch-partial-sum backends: fenwick (the bank itself) or the interval-union
// reduction over either instrumented backend.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "graph_reductions.hpp"
#include "interval_union.hpp"
#include "partial_sum.hpp"
#include "probe_memory.hpp"
#include "reductions.hpp"

namespace probelab {

class dynamic_interval_union {
 public:
  virtual ~dynamic_interval_union() = default;
  virtual std::uint64_t universe() const = 0;
  virtual void insert(std::uint64_t a, std::uint64_t b) = 0;
  virtual void erase(std::uint64_t a, std::uint64_t b) = 0;
  virtual std::uint64_t query() = 0;
};

template <class Impl>
class union_handle final : public dynamic_interval_union {
 public:
  template <class... Args>
  explicit union_handle(Args&&... args) : impl_(std::forward<Args>(args)...) {}
  std::uint64_t universe() const override { return impl_.universe(); }
  void insert(std::uint64_t a, std::uint64_t b) override { impl_.insert(a, b); }
  void erase(std::uint64_t a, std::uint64_t b) override { impl_.erase(a, b); }
  std::uint64_t query() override { return impl_.query(); }
  Impl& impl() noexcept { return impl_; }

 private:
  Impl impl_;
};

inline constexpr std::string_view interval_backend_names[] = {"segment_tree", "naive_bitmap", "scc",
                                                              "shortest_path", "mincost_flow"};

inline std::unique_ptr<dynamic_interval_union> make_interval_union(std::string_view backend, cell_memory& mem,
                                                                   std::uint64_t n) {
  if (backend == "segment_tree") return std::make_unique<union_handle<segment_tree_union>>(mem, n);
  if (backend == "naive_bitmap") return std::make_unique<union_handle<naive_bitmap_union>>(mem, n);
  if (backend == "scc") return std::make_unique<union_handle<scc_union>>(n);
  if (backend == "shortest_path") return std::make_unique<union_handle<shortest_path_union>>(n);
  if (backend == "mincost_flow") return std::make_unique<union_handle<mincost_flow_union>>(n);
  throw config_error("unknown interval-union backend \"" + std::string(backend) + "\"");
}

class bps_structure {
 public:
  virtual ~bps_structure() = default;
  virtual const bank_shape& shape() const = 0;
  virtual void update(std::span<const std::uint64_t> j, std::span<const std::uint64_t> v) = 0;
  virtual std::uint64_t query(std::span<const std::uint64_t> j) = 0;
};

template <class Impl>
class bps_handle final : public bps_structure {
 public:
  bps_handle(cell_memory& mem, bank_shape s) : impl_(mem, s) {}
  const bank_shape& shape() const override { return impl_.shape(); }
  void update(std::span<const std::uint64_t> j, std::span<const std::uint64_t> v) override { impl_.update(j, v); }
  std::uint64_t query(std::span<const std::uint64_t> j) override { return impl_.query(j); }
  Impl& impl() noexcept { return impl_; }

 private:
  Impl impl_;
};

inline constexpr std::string_view bps_backend_names[] = {"fenwick", "segment_tree", "naive_bitmap"};

inline std::unique_ptr<bps_structure> make_bps_structure(std::string_view backend, cell_memory& mem,
                                                         bank_shape shape) {
  if (backend == "fenwick") return std::make_unique<bps_handle<fp_sequence_bank>>(mem, shape);
  if (backend == "segment_tree") return std::make_unique<bps_handle<bps_via_diu<segment_tree_union>>>(mem, shape);
  if (backend == "naive_bitmap") return std::make_unique<bps_handle<bps_via_diu<naive_bitmap_union>>>(mem, shape);
  throw config_error("unknown batch-partial-sum backend \"" + std::string(backend) + "\"");
}

}  // namespace probelab
