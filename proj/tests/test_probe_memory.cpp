#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "probelab.hpp"

using namespace probelab;

TEST(CellMemory, FreshReadIsZeroAndLogged) {
  cell_memory mem;
  EXPECT_EQ(mem.probe_read(7, 0), 0u);
  ASSERT_EQ(mem.log().size(), 1u);
  EXPECT_EQ(mem.log().entries()[0], (probe_record{0, probe_kind::read, 7}));
}

TEST(CellMemory, ReadAfterWrite) {
  cell_memory mem;
  mem.probe_write(7, 42, 0);
  EXPECT_EQ(mem.probe_read(7, 0), 42u);
}

TEST(CellMemory, AddressOutOfRange) {
  cell_memory mem(16);
  EXPECT_THROW(mem.probe_read(std::uint64_t{1} << 16, 0), range_error);
  EXPECT_NO_THROW(mem.probe_read((std::uint64_t{1} << 16) - 1, 0));
}

TEST(CellMemory, LastWriterWins) {
  cell_memory mem;
  mem.probe_write(3, 5, 0);
  mem.probe_write(3, 9, 0);
  EXPECT_EQ(mem.probe_read(3, 0), 9u);
}

TEST(CellMemory, WordTooWide) {
  cell_memory mem(12);
  EXPECT_THROW(mem.probe_write(0, 1u << 12, 0), encoding_error);
  EXPECT_NO_THROW(mem.probe_write(0, (1u << 12) - 1, 0));
  EXPECT_THROW(cell_memory(0), config_error);
  EXPECT_THROW(cell_memory(65), config_error);
}

TEST(CellMemory, OneRecordPerProbe) {
  cell_memory mem;
  for (address a = 0; a < 100; ++a) mem.probe_write(a * 3, a + 1, 0);
  EXPECT_EQ(mem.log().size(), 100u);
}

TEST(CellMemory, OpIndexMustNotDecrease) {
  cell_memory mem;
  mem.probe_read(1, 5);
  EXPECT_THROW(mem.probe_read(1, 4), invariant_violation);
  mem.begin_op(5);
  EXPECT_THROW(mem.begin_op(4), invariant_violation);
}

TEST(ProbeSet, EmptyRangeAndFullRange) {
  cell_memory mem;
  for (std::uint64_t t = 0; t < 5; ++t) {
    mem.begin_op(t);
    mem.read(t % 3);
    mem.write(10 + t, t + 1);
  }
  EXPECT_TRUE(probe_set(mem.log(), 2, 2).empty());
  const auto all = probe_set(mem.log(), 0, 5);
  EXPECT_EQ(all, (std::vector<address>{0, 1, 2, 10, 11, 12, 13, 14}));
}

TEST(ProbeSet, DyadicIntersectionsMatchRawScan) {
  const auto ops = gen_hard_bps({2, 32, 37, 11});
  cell_memory mem;
  bps_via_diu<segment_tree_union> ds(mem, {2, 32, 37});
  for (std::size_t t = 0; t < ops.size(); ++t) {
    mem.begin_op(t);
    if (const auto* u = std::get_if<bps_update_op>(&ops[t])) ds.update(u->j, u->v);
    else ds.query(std::get<bps_query_op>(ops[t]).j);
  }
  for (const char* label : {"", "0", "1", "01", "110"}) {
    const game_split split(dyadic_label::parse(label), 5);
    const auto [a0, a1] = split.alice_ops();
    const auto [b0, b1] = split.bob_ops();
    std::set<address> in_a, in_b;
    for (const auto& r : mem.log().entries()) {
      if (r.op_index >= a0 && r.op_index < a1) in_a.insert(r.addr);
      if (r.op_index >= b0 && r.op_index < b1) in_b.insert(r.addr);
    }
    std::size_t brute = 0;
    for (auto a : in_a) brute += in_b.count(a);
    const auto pa = probe_set(mem.log(), a0, a1), pb = probe_set(mem.log(), b0, b1);
    std::vector<address> both;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(both));
    EXPECT_EQ(both.size(), brute) << label;
    EXPECT_EQ(pa.size(), in_a.size());
  }
}

TEST(ProbeSet, MonotoneInRange) {
  splitmix64 rng(3);
  cell_memory mem;
  for (std::uint64_t t = 0; t < 50; ++t) {
    mem.begin_op(t);
    for (int i = 0; i < 4; ++i) mem.read(rng.below(40));
  }
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t lo = rng.below(50), hi = rng.between(lo, 50);
    const std::uint64_t lo2 = rng.below(lo + 1), hi2 = rng.between(hi, 50);
    const auto inner = probe_set(mem.log(), lo, hi), outer = probe_set(mem.log(), lo2, hi2);
    EXPECT_TRUE(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
  }
}

TEST(Snapshot, RestoreUndoesWrites) {
  cell_memory mem;
  mem.probe_write(1, 4, 0);
  const auto snap = mem.take_snapshot();
  mem.probe_write(1, 9, 0);
  mem.restore(snap);
  EXPECT_EQ(mem.probe_read(1, 0), 4u);
}

TEST(Snapshot, FreshSnapshotReadsZero) {
  cell_memory mem;
  const auto snap = mem.take_snapshot();
  mem.probe_write(5, 5, 0);
  mem.probe_write(6, 6, 0);
  mem.restore(snap);
  for (address a = 0; a < 10; ++a) EXPECT_EQ(mem.peek(a), 0u);
  cell_memory narrow(32);
  EXPECT_THROW(narrow.restore(snap), config_error);
}

// A suffix replayed from a mid-run snapshot yields identical answers and an
// identical probe log, for every instrumented structure.
template <class Run>
void check_replay(Run run_suffix) {
  cell_memory mem;
  auto [snap, first_answers] = run_suffix(mem, std::nullopt);
  const probe_log first_log = mem.log();
  cell_memory again;
  auto [unused, second_answers] = run_suffix(again, snap);
  EXPECT_EQ(first_answers, second_answers);
  const auto [lo, hi] = first_log.span_of(50, 1000);
  std::vector<probe_record> a(first_log.entries().begin() + lo, first_log.entries().begin() + hi);
  EXPECT_EQ(a, again.log().entries());
}

TEST(Snapshot, ReplayDeterminismAllStructures) {
  const auto ops = gen_hard_bps({3, 64, 67, 5});
  for (const char* backend : {"fenwick", "segment_tree", "naive_bitmap"}) {
    SCOPED_TRACE(backend);
    check_replay([&](cell_memory& mem, std::optional<snapshot> from) {
      auto ds = make_bps_structure(backend, mem, {3, 64, 67});
      std::optional<snapshot> at50;
      std::vector<std::uint64_t> answers;
      if (from) mem.restore(*from);
      for (std::uint64_t t = from ? 50 : 0; t < ops.size(); ++t) {
        if (t == 50) at50 = mem.take_snapshot();
        mem.begin_op(t);
        if (const auto* u = std::get_if<bps_update_op>(&ops[t])) ds->update(u->j, u->v);
        else if (t >= 50) answers.push_back(ds->query(std::get<bps_query_op>(ops[t]).j));
        else ds->query(std::get<bps_query_op>(ops[t]).j);
      }
      return std::pair{*at50, answers};
    });
  }
}

TEST(ProbeLog, CsvExport) {
  cell_memory mem;
  mem.begin_op(0);
  mem.write(3, 1);
  mem.begin_op(2);
  mem.read(3);
  std::ostringstream os;
  write_probe_log_csv(os, mem.log());
  EXPECT_EQ(os.str(), "op_index,kind,address\n0,write,3\n2,read,3\n");
  EXPECT_EQ(mem.log().op_count(), 3u);
  EXPECT_EQ(mem.log().probes_per_op(), (std::vector<std::size_t>{1, 0, 1}));
}

TEST(ProbeHook, SeesEveryProbeBeforeItIsServed) {
  cell_memory mem;
  std::vector<address> seen;
  mem.set_probe_hook([&](address a, probe_kind k) {
    seen.push_back(a);
    if (k == probe_kind::read) mem.poke(a, 77);
  });
  mem.probe_write(1, 2, 0);
  EXPECT_EQ(mem.probe_read(4, 0), 77u);
  EXPECT_EQ(seen, (std::vector<address>{1, 4}));
}
