#pragma once

// The Merlin-assisted game G(I_A, I_B) played on a hard batch-partial-sum
// sequence. Alice knows the operations of I_A, Bob those of I_B, and both
// know everything before I_A. Merlin sees both inputs but not the shared
// random bits.
//
//   1. Merlin sends one bit per cell first probed in I_B: 1 iff Alice probed
//      it during I_A.
//   2. Bob restores the memory as of the start of I_A, skips I_A, and replays
//      I_B. On the first probe of each cell he reads the next bit. A 1 costs
//      2w bits: he sends the address, and Alice returns the cell's content at
//      the end of I_A, rejecting if she never probed it. A 0 means Bob trusts
//      his own copy, and the cell joins his zero-set.
//   3. Alice's probe set and Bob's zero-set go through sparse set
//      disjointness; an intersection means Merlin lied.
//
// If Bob runs out of bits, has bits left over, or his simulation breaks down
// (only possible after a lie), the game rejects.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "disjointness.hpp"
#include "errors.hpp"
#include "hard_instances.hpp"
#include "operations.hpp"
#include "probe_memory.hpp"
#include "rng.hpp"
#include "structures.hpp"
#include "json.hpp"

namespace probelab {

// ledger.total <= game_cost_constant * (|P_A| + |P_B| + w |P_A ∩ P_B|) for a
// truthful Merlin. Stage 2 alone contributes 2w per shared cell; the rest is
// the message (|P_B| bits) and disjointness (about 7 bits per element).
inline constexpr double game_cost_constant = 4.0;

using merlin_message = std::vector<bool>;
using structure_factory = std::function<std::unique_ptr<bps_structure>(cell_memory&, bank_shape)>;

inline structure_factory bps_factory(std::string backend) {
  if (std::find(std::begin(bps_backend_names), std::end(bps_backend_names), backend) == std::end(bps_backend_names))
    throw config_error("unknown batch-partial-sum backend \"" + backend + "\"");
  return [backend](cell_memory& mem, bank_shape s) { return make_bps_structure(backend, mem, s); };
}

struct cost_ledger {
  std::uint64_t merlin_bits = 0;
  std::uint64_t alice_bob_bits = 0;
  std::uint64_t disjointness_bits = 0;
  std::uint64_t total() const noexcept { return merlin_bits + alice_bob_bits + disjointness_bits; }
};

enum class verdict { accept, reject };

struct game_outcome {
  verdict result = verdict::reject;
  std::string reason;                  // empty on accept
  std::vector<std::uint64_t> answers;  // Bob's answers to the queries of I_B, on accept
  cost_ledger ledger;
  bool accepted() const noexcept { return result == verdict::accept; }
};

// Shape of a hard trace: K sequences, B = 2^b operations pairs.
struct trace_shape {
  std::uint64_t K = 0;
  std::uint64_t B = 0;
  unsigned b = 0;
  std::uint64_t max_value = 0;
};

inline trace_shape inspect_hard_trace(const operation_sequence& trace) {
  trace_shape s;
  s.B = hard_sequence_length(trace);
  s.b = floor_log2(s.B);
  s.K = std::get<bps_update_op>(trace[0]).j.size();
  for (const auto& op : trace) {
    const auto& j = op.index() == 3 ? std::get<bps_update_op>(op).j : std::get<bps_query_op>(op).j;
    if (j.size() != s.K) throw shape_error("hard sequence: operations disagree on K");
    if (const auto* u = std::get_if<bps_update_op>(&op))
      for (auto v : u->v) s.max_value = std::max(s.max_value, v);
  }
  return s;
}

namespace detail {

inline std::uint64_t apply_op(bps_structure& ds, const operation& op) {
  if (const auto* u = std::get_if<bps_update_op>(&op)) {
    ds.update(u->j, u->v);
    return 0;
  }
  return ds.query(std::get<bps_query_op>(op).j);
}

struct game_rejection {
  std::string reason;
};

}  // namespace detail

// Everything the three parties compute before any message is exchanged: the
// monolithic run through the end of I_B with its probe sets, the prefix
// snapshot Bob starts from, and Alice's memory at the end of I_A.
class game_setup {
 public:
  game_setup(operation_sequence trace, structure_factory factory, std::uint64_t p, const dyadic_label& s,
             unsigned word_size = 64)
      : trace_(std::move(trace)),
        factory_(std::move(factory)),
        shape_(inspect_hard_trace(trace_)),
        split_(s, shape_.b),
        w_(word_size) {
    bank_ = {shape_.K, shape_.B, p};
    if (shape_.max_value >= p) throw config_error("game: trace values do not fit in F_p");
    std::tie(a0_, a1_) = split_.alice_ops();
    std::tie(b0_, b1_) = split_.bob_ops();

    cell_memory mem(w_);
    auto ds = factory_(mem, bank_);
    for (std::uint64_t t = 0; t < b1_; ++t) {
      if (t == a0_) prefix_ = mem.take_snapshot();
      if (t == b0_) alice_end_ = mem.take_snapshot();
      mem.begin_op(t);
      const std::uint64_t ans = detail::apply_op(*ds, trace_[t]);
      if (t >= b0_ && is_query(trace_[t])) reference_answers_.push_back(ans);
    }
    log_ = mem.log();

    p_a_ = probe_set(log_, a0_, a1_);
    p_b_ = probe_set(log_, b0_, b1_);
    std::set_intersection(p_a_.begin(), p_a_.end(), p_b_.begin(), p_b_.end(), std::back_inserter(shared_));

    std::unordered_set<address> seen;
    auto [lo, hi] = log_.span_of(b0_, b1_);
    for (std::size_t i = lo; i < hi; ++i) {
      const address a = log_.entries()[i].addr;
      if (seen.insert(a).second) truthful_.push_back(std::binary_search(p_a_.begin(), p_a_.end(), a));
    }
  }

  const merlin_message& truthful_message() const noexcept { return truthful_; }
  const std::vector<std::uint64_t>& reference_answers() const noexcept { return reference_answers_; }
  const std::vector<address>& alice_probes() const noexcept { return p_a_; }
  const std::vector<address>& bob_probes() const noexcept { return p_b_; }
  const std::vector<address>& shared_probes() const noexcept { return shared_; }
  const probe_log& monolithic_log() const noexcept { return log_; }
  const game_split& split() const noexcept { return split_; }
  const bank_shape& bank() const noexcept { return bank_; }
  unsigned word_size() const noexcept { return w_; }

  // |P_A| + |P_B| + w |P_A ∩ P_B|
  std::uint64_t cost_measure() const noexcept { return p_a_.size() + p_b_.size() + w_ * shared_.size(); }

  game_outcome play(const merlin_message& z, std::uint64_t seed) const {
    game_outcome out;
    out.ledger.merlin_bits = z.size();
    std::vector<address> zero_set;
    try {
      cell_memory bob(w_);
      auto ds = factory_(bob, bank_);
      bob.restore(prefix_);

      std::unordered_set<address> seen;
      std::size_t pos = 0;
      bob.set_probe_hook([&](address a, probe_kind) {
        if (!seen.insert(a).second) return;
        if (pos >= z.size()) throw detail::game_rejection{"message too short"};
        if (!z[pos++]) {
          zero_set.push_back(a);
          return;
        }
        out.ledger.alice_bob_bits += 2 * w_;
        if (!std::binary_search(p_a_.begin(), p_a_.end(), a))
          throw detail::game_rejection{"alice: cell " + std::to_string(a) + " was not probed in I_A"};
        auto it = alice_end_.cells.find(a);
        bob.poke(a, it == alice_end_.cells.end() ? 0 : it->second);
      });

      for (std::uint64_t t = b0_; t < b1_; ++t) {
        bob.begin_op(t);
        const std::uint64_t ans = detail::apply_op(*ds, trace_[t]);
        if (is_query(trace_[t])) out.answers.push_back(ans);
      }
      bob.clear_probe_hook();
      if (pos != z.size()) throw detail::game_rejection{"message too long"};
    } catch (const detail::game_rejection& r) {
      return reject(std::move(out), r.reason);
    } catch (const std::exception& e) {
      return reject(std::move(out), std::string("bob's simulation failed: ") + e.what());
    }

    const auto disj = sparse_set_disjointness(p_a_, zero_set, w_, seed);
    out.ledger.disjointness_bits = disj.bits_used;
    if (!disj.disjoint) return reject(std::move(out), "disjointness: a zero bit names a cell probed in I_A");
    out.result = verdict::accept;
    return out;
  }

 private:
  static game_outcome reject(game_outcome out, std::string reason) {
    out.result = verdict::reject;
    out.reason = std::move(reason);
    out.answers.clear();
    return out;
  }

  operation_sequence trace_;
  structure_factory factory_;
  trace_shape shape_;
  game_split split_;
  unsigned w_;
  bank_shape bank_;
  std::uint64_t a0_ = 0, a1_ = 0, b0_ = 0, b1_ = 0;
  snapshot prefix_;
  snapshot alice_end_;
  probe_log log_;
  std::vector<address> p_a_, p_b_, shared_;
  merlin_message truthful_;
  std::vector<std::uint64_t> reference_answers_;
};

// Merlin's message. The structure is run twice; differing probe logs mean it
// is not a deterministic function of the operations.
inline merlin_message build_merlin_message(const operation_sequence& trace, const structure_factory& factory,
                                           std::uint64_t p, const dyadic_label& s, unsigned word_size = 64) {
  game_setup first(trace, factory, p, s, word_size);
  game_setup second(trace, factory, p, s, word_size);
  if (!(first.monolithic_log() == second.monolithic_log()))
    throw integrity_error("merlin: two runs of the structure produced different probe logs");
  return first.truthful_message();
}

inline game_outcome run_game(const operation_sequence& trace, const structure_factory& factory, std::uint64_t p,
                             const dyadic_label& s, const merlin_message& z, std::uint64_t seed,
                             unsigned word_size = 64) {
  return game_setup(trace, factory, p, s, word_size).play(z, seed);
}

// Corruptions used by the fuzzers and the CLI: "flip:k", "truncate:k" (drop
// the last k bits), "extend:k" (append k zero bits).
inline merlin_message corrupt_message(merlin_message z, const std::string& how) {
  const auto colon = how.find(':');
  if (colon == std::string::npos) throw config_error("corruption must look like kind:k, got \"" + how + "\"");
  const std::string kind = how.substr(0, colon);
  std::uint64_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoull(how.substr(colon + 1), &used);
    if (used != how.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw config_error("corruption count must be a nonnegative integer: \"" + how + "\"");
  }
  if (kind == "flip") {
    if (k >= z.size()) throw config_error("flip position " + std::to_string(k) + " beyond message length");
    z[k] = !z[k];
  } else if (kind == "truncate") {
    if (k == 0 || k > z.size()) throw config_error("truncate count must be in [1, |z|]");
    z.resize(z.size() - k);
  } else if (kind == "extend") {
    if (k == 0) throw config_error("extend count must be >= 1");
    z.resize(z.size() + k, false);
  } else {
    throw config_error("unknown corruption \"" + kind + "\"");
  }
  return z;
}

inline nlohmann::json to_json(const cost_ledger& l) {
  return {{"merlin_bits", l.merlin_bits},
          {"alice_bob_bits", l.alice_bob_bits},
          {"disjointness_bits", l.disjointness_bits},
          {"total", l.total()}};
}

inline nlohmann::json to_json(const game_outcome& g) {
  nlohmann::json j{{"verdict", g.accepted() ? "accept" : "reject"}, {"ledger", to_json(g.ledger)}};
  if (g.accepted())
    j["answers"] = g.answers;
  else
    j["reason"] = g.reason;
  return j;
}

}  // namespace probelab
