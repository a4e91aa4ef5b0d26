#include <gtest/gtest.h>

#include <set>

#include "probelab.hpp"

using namespace probelab;

namespace {

struct instance {
  operation_sequence ops;
  std::uint64_t p;
};

instance small_instance(std::uint64_t seed, std::uint64_t K = 2, std::uint64_t B = 16, std::uint64_t p = 17) {
  return {gen_hard_bps({K, B, p, seed}), p};
}

// Answers of an uninterrupted run over the whole trace, restricted to I_B.
std::vector<std::uint64_t> monolithic_answers(const instance& in, const char* backend, const game_split& split) {
  cell_memory mem;
  const auto K = std::get<bps_update_op>(in.ops[0]).j.size();
  auto ds = make_bps_structure(backend, mem, {K, in.ops.size() / 2, in.p});
  const auto [b0, b1] = split.bob_ops();
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = 0; t < in.ops.size(); ++t) {
    if (const auto* u = std::get_if<bps_update_op>(&in.ops[t])) ds->update(u->j, u->v);
    else {
      const auto a = ds->query(std::get<bps_query_op>(in.ops[t]).j);
      if (t >= b0 && t < b1) out.push_back(a);
    }
  }
  return out;
}

}  // namespace

TEST(MerlinMessage, LengthIsBobsProbeSetFromTheLog) {
  const auto in = small_instance(1);
  const auto z = build_merlin_message(in.ops, bps_factory("segment_tree"), in.p, dyadic_label::parse("0"));
  cell_memory mem;
  auto ds = make_bps_structure("segment_tree", mem, {2, 16, 17});
  for (std::uint64_t t = 0; t < in.ops.size(); ++t) {
    mem.begin_op(t);
    detail::apply_op(*ds, in.ops[t]);
  }
  const game_split split(dyadic_label::parse("0"), 4);
  const auto [a0, a1] = split.alice_ops();
  const auto [b0, b1] = split.bob_ops();
  std::set<address> pa, pb;
  for (const auto& r : mem.log().entries()) {
    if (r.op_index >= a0 && r.op_index < a1) pa.insert(r.addr);
    if (r.op_index >= b0 && r.op_index < b1) pb.insert(r.addr);
  }
  ASSERT_EQ(z.size(), pb.size());
  std::size_t ones = 0;
  for (bool bit : z) ones += bit;
  std::size_t shared = 0;
  for (auto a : pb) shared += pa.count(a);
  EXPECT_EQ(ones, shared);
}

// A structure whose I_B issues no probes at all gets the empty message, and a
// cell probed repeatedly in I_B costs one bit.
namespace {
class sparse_probe_structure final : public bps_structure {
 public:
  sparse_probe_structure(cell_memory& mem, bank_shape s) : mem_(&mem), shape_(s) { cell_ = mem.allocate(1); }
  const bank_shape& shape() const override { return shape_; }
  void update(std::span<const std::uint64_t>, std::span<const std::uint64_t>) override {
    if (mem_->current_op() < 16) mem_->write(cell_, mem_->current_op() + 1);
  }
  std::uint64_t query(std::span<const std::uint64_t>) override {
    if (mem_->current_op() < 16) return 0;
    if (!touch_) return 0;
    return mem_->read(cell_) + mem_->read(cell_) + mem_->read(cell_);
  }
  static inline bool touch_ = false;

 private:
  cell_memory* mem_;
  bank_shape shape_;
  address cell_ = 0;
};
}  // namespace

TEST(MerlinMessage, EmptyAndFirstProbeOnly) {
  const auto in = small_instance(2);
  const structure_factory factory = [](cell_memory& m, bank_shape s) {
    return std::make_unique<sparse_probe_structure>(m, s);
  };
  sparse_probe_structure::touch_ = false;
  EXPECT_TRUE(build_merlin_message(in.ops, factory, in.p, dyadic_label::parse("")).empty());
  sparse_probe_structure::touch_ = true;
  const auto z = build_merlin_message(in.ops, factory, in.p, dyadic_label::parse(""));
  EXPECT_EQ(z, merlin_message{true});
  const game_setup g(in.ops, factory, in.p, dyadic_label::parse(""));
  const auto honest = g.play(z, 1);
  EXPECT_TRUE(honest.accepted());
  EXPECT_EQ(honest.ledger.alice_bob_bits, 128u);
  EXPECT_FALSE(g.play({false}, 1).accepted());
  EXPECT_FALSE(g.play({}, 1).accepted());
  sparse_probe_structure::touch_ = false;
}

TEST(MerlinMessage, NondeterminismIsDetected) {
  const auto in = small_instance(3);
  auto calls = std::make_shared<int>(0);
  const structure_factory flaky = [calls](cell_memory& m, bank_shape s) {
    ++*calls;
    if (*calls == 2) m.allocate(5);  // second run lays the structure out elsewhere
    return make_bps_structure("segment_tree", m, s);
  };
  EXPECT_THROW(build_merlin_message(in.ops, flaky, in.p, dyadic_label::parse("")), integrity_error);
}

TEST(Game, CompletenessAndAnswerFidelity) {
  for (const char* backend : {"segment_tree", "naive_bitmap", "fenwick"}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto in = small_instance(seed, 3, 16, 17);
      for (const char* s : {"", "1", "01", "110"}) {
        const game_setup g(in.ops, bps_factory(backend), in.p, dyadic_label::parse(s));
        const auto out = g.play(g.truthful_message(), seed + 100);
        ASSERT_TRUE(out.accepted()) << backend << " " << s << ": " << out.reason;
        ASSERT_EQ(out.answers, monolithic_answers(in, backend, g.split()));
        EXPECT_EQ(out.ledger.total(),
                  out.ledger.merlin_bits + out.ledger.alice_bob_bits + out.ledger.disjointness_bits);
        EXPECT_EQ(out.ledger.merlin_bits, g.bob_probes().size());
        EXPECT_EQ(out.ledger.alice_bob_bits, 2 * 64 * g.shared_probes().size());
        EXPECT_LE(static_cast<double>(out.ledger.total()), game_cost_constant * static_cast<double>(g.cost_measure()));
      }
    }
  }
}

TEST(Game, EverySingleFlipRejectsAtTheRightStage) {
  const auto in = small_instance(7);
  const game_setup g(in.ops, bps_factory("segment_tree"), in.p, dyadic_label::parse("0"));
  const auto& z = g.truthful_message();
  ASSERT_FALSE(z.empty());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const auto out = g.play(corrupt_message(z, "flip:" + std::to_string(k)), 11);
    ASSERT_FALSE(out.accepted()) << k;
    EXPECT_TRUE(out.answers.empty());
    // Bob's simulation is still on track when he reads the flipped bit, so a
    // 0 turned into 1 names a cell Alice never probed and she refuses it.
    if (!z[k]) EXPECT_NE(out.reason.find("alice"), std::string::npos) << out.reason;
  }
}

TEST(Game, TruncationsAndExtensionsReject) {
  const auto in = small_instance(8);
  const game_setup g(in.ops, bps_factory("naive_bitmap"), in.p, dyadic_label::parse("1"));
  const auto& z = g.truthful_message();
  for (std::size_t k = 1; k <= z.size(); ++k)
    ASSERT_FALSE(g.play(corrupt_message(z, "truncate:" + std::to_string(k)), 3).accepted());
  for (std::size_t k = 1; k <= 64; ++k) {
    ASSERT_FALSE(g.play(corrupt_message(z, "extend:" + std::to_string(k)), 3).accepted());
    merlin_message ones = z;
    ones.resize(z.size() + k, true);
    ASSERT_FALSE(g.play(ones, 3).accepted());
  }
}

TEST(Game, RandomMultiBitCorruptionsReject) {
  splitmix64 rng(5);
  const auto in = small_instance(9, 2, 32, 37);
  const game_setup g(in.ops, bps_factory("segment_tree"), in.p, dyadic_label::parse(""));
  for (int trial = 0; trial < 500; ++trial) {
    merlin_message bad = g.truthful_message();
    const auto flips = rng.between(1, 6);
    std::set<std::uint64_t> at;
    while (at.size() < flips) at.insert(rng.below(bad.size()));
    for (auto k : at) bad[k] = !bad[k];
    ASSERT_FALSE(g.play(bad, rng()).accepted());
  }
}

TEST(Game, CorruptionSpecs) {
  const merlin_message z{true, false, true};
  EXPECT_EQ(corrupt_message(z, "flip:1"), (merlin_message{true, true, true}));
  EXPECT_EQ(corrupt_message(z, "truncate:2"), (merlin_message{true}));
  EXPECT_EQ(corrupt_message(z, "extend:1"), (merlin_message{true, false, true, false}));
  EXPECT_THROW(corrupt_message(z, "flip:3"), config_error);
  EXPECT_THROW(corrupt_message(z, "flip"), config_error);
  EXPECT_THROW(corrupt_message(z, "rot:1"), config_error);
  EXPECT_THROW(corrupt_message(z, "flip:x"), config_error);
}

TEST(Game, MalformedTraces) {
  auto ops = gen_hard_bps({2, 16, 17, 1});
  ops.pop_back();
  EXPECT_THROW(game_setup(ops, bps_factory("segment_tree"), 17, dyadic_label::parse("")), shape_error);
  auto swapped = gen_hard_bps({2, 16, 17, 1});
  std::swap(swapped[0], swapped[1]);
  EXPECT_THROW(game_setup(swapped, bps_factory("segment_tree"), 17, dyadic_label::parse("")), shape_error);
  EXPECT_THROW(game_setup(gen_hard_bps({2, 16, 17, 1}), bps_factory("segment_tree"), 17, dyadic_label::parse("0000")),
               config_error);
  EXPECT_THROW(bps_factory("splay"), config_error);
}

TEST(Game, SmallWordSize) {
  const auto in = small_instance(4, 2, 16, 17);
  const game_setup g(in.ops, bps_factory("segment_tree"), in.p, dyadic_label::parse(""), 24);
  const auto out = g.play(g.truthful_message(), 2);
  ASSERT_TRUE(out.accepted()) << out.reason;
  EXPECT_EQ(out.ledger.alice_bob_bits, 2 * 24 * g.shared_probes().size());
  EXPECT_EQ(out.answers, g.reference_answers());
}
