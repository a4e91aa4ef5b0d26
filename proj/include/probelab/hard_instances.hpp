#pragma once

// The hard batch-partial-sum distribution and the tools around it.
//
// A sequence has B = 2^b updates and B queries, alternating U_0, Q_0, ...,
// U_{B-1}, Q_{B-1}. U_t writes entry rev(t) + 1 of every sequence with an
// independent uniform residue; Q_t asks for independent uniform prefix bounds
// in [1, B]. rev(t) is t's b-bit string reversed, so every dyadic block of
// time touches entries spread evenly over [1, B]. (Entries are 1-based, hence
// the +1.)
//
// Operation t of the bps trace has op index 2t (update) or 2t + 1 (query).
// A dyadic label s (|s| < b) selects I_s = {U_t, Q_t : s is a prefix of t};
// games and audits compare I_{s0} with I_{s1}.

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "interval_union.hpp"
#include "modular.hpp"
#include "operations.hpp"
#include "partial_sum.hpp"
#include "probe_memory.hpp"
#include "reductions.hpp"
#include "rng.hpp"
#include "json.hpp"

namespace probelab {

inline std::uint64_t bit_reverse(std::uint64_t t, unsigned bits) {
  if (bits > 63 || t >= (std::uint64_t{1} << bits))
    throw range_error("bit_reverse: " + std::to_string(t) + " does not fit in " + std::to_string(bits) + " bits");
  std::uint64_t r = 0;
  for (unsigned i = 0; i < bits; ++i) r |= ((t >> i) & 1) << (bits - 1 - i);
  return r;
}

struct hard_dist_params {
  std::uint64_t K = 1;
  std::uint64_t B = 1;
  std::uint64_t p = 2;
  std::uint64_t seed = 0;

  unsigned b() const { return floor_log2(B); }

  void validate() const {
    if (K < 1) throw config_error("hard distribution: K must be >= 1");
    if (!is_power_of_two(B)) throw config_error("hard distribution: B must be a power of two");
    if (p < B) throw config_error("hard distribution: p must be >= B");
    if (!is_prime(p)) throw config_error("hard distribution: p must be prime");
  }
};

inline operation_sequence gen_hard_bps(const hard_dist_params& params) {
  params.validate();
  splitmix64 rng(params.seed);
  const unsigned b = params.b();
  operation_sequence ops;
  ops.reserve(2 * params.B);
  for (std::uint64_t t = 0; t < params.B; ++t) {
    bps_update_op u;
    u.j.assign(params.K, bit_reverse(t, b) + 1);
    u.v.resize(params.K);
    for (auto& v : u.v) v = rng.below(params.p);
    ops.emplace_back(std::move(u));
    bps_query_op q;
    q.j.resize(params.K);
    for (auto& j : q.j) j = rng.between(1, params.B);
    ops.emplace_back(std::move(q));
  }
  return ops;
}

// Checks that `ops` has the alternating 2B-operation shape and returns B.
inline std::uint64_t hard_sequence_length(const operation_sequence& ops) {
  const std::uint64_t B = ops.size() / 2;
  if (ops.size() % 2 != 0 || !is_power_of_two(B))
    throw shape_error("hard sequence: expected 2B operations with B a power of two, got " + std::to_string(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const bool want_update = i % 2 == 0;
    if (want_update ? !std::holds_alternative<bps_update_op>(ops[i]) : !std::holds_alternative<bps_query_op>(ops[i]))
      throw shape_error("hard sequence: operation " + std::to_string(i) + " breaks the U/Q alternation");
  }
  return B;
}

// Binary string s with |s| < b, stored as (length, value) with the first
// character as the most significant bit.
struct dyadic_label {
  unsigned length = 0;
  std::uint64_t value = 0;

  static dyadic_label parse(const std::string& s) {
    dyadic_label d;
    if (s.size() > 62) throw config_error("dyadic label too long");
    for (char c : s) {
      if (c != '0' && c != '1') throw config_error("dyadic label must be a 0/1 string, got \"" + s + "\"");
      d.value = (d.value << 1) | static_cast<std::uint64_t>(c - '0');
      ++d.length;
    }
    return d;
  }

  std::string str() const {
    std::string s(length, '0');
    for (unsigned i = 0; i < length; ++i) s[i] = ((value >> (length - 1 - i)) & 1) ? '1' : '0';
    return s;
  }

  dyadic_label child(unsigned bit) const { return {length + 1, (value << 1) | bit}; }

  // Range of t (update/query pair index) with prefix s, for b-bit t.
  std::pair<std::uint64_t, std::uint64_t> t_range(unsigned b) const {
    if (length > b) throw config_error("dyadic label longer than b");
    const std::uint64_t width = std::uint64_t{1} << (b - length);
    return {value * width, (value + 1) * width};
  }

  // Half-open op-index range of I_s.
  std::pair<std::uint64_t, std::uint64_t> op_range(unsigned b) const {
    auto [lo, hi] = t_range(b);
    return {2 * lo, 2 * hi};
  }
};

// Dyadic split of a game: I_A = I_{s0}, I_B = I_{s1}.
struct game_split {
  dyadic_label s;
  unsigned b = 0;

  game_split(dyadic_label label, unsigned bits) : s(label), b(bits) {
    if (s.length >= b) throw config_error("split label must be shorter than b = " + std::to_string(b));
  }
  std::pair<std::uint64_t, std::uint64_t> alice_ops() const { return s.child(0).op_range(b); }
  std::pair<std::uint64_t, std::uint64_t> bob_ops() const { return s.child(1).op_range(b); }
  // L = |I_A| / 2 = number of updates in I_A = number of queries in I_B.
  std::uint64_t tuple_size() const { return std::uint64_t{1} << (b - s.length - 1); }
};

struct diu_instance {
  std::uint64_t K = 0, B = 0, p = 0, n = 0;
  operation_sequence bps_trace;
  operation_sequence diu_trace;
  std::vector<std::uint64_t> bps_answers;  // answers produced through the reduction
  std::uint64_t inserts = 0, deletes = 0, queries = 0;
  std::uint64_t max_interval_ops_per_update = 0;
  std::uint64_t max_interval_ops_per_query = 0;
};

// Parameters for the induced interval-union distribution on [0, n]:
// B = largest power of two <= n^eps, p = smallest prime > B, K = max(1,
// floor(n / (B p))); the instance lives on [0, K B p].
inline hard_dist_params solve_diu_params(std::uint64_t n, double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw config_error("eps must lie in (0, 1)");
  if (n < 2) throw config_error("n must be >= 2");
  const long double target = std::pow(static_cast<long double>(n), static_cast<long double>(eps));
  std::uint64_t B = 1;
  while (static_cast<long double>(B) * 2 <= target * (1 + 1e-12L)) B *= 2;
  const std::uint64_t p = next_prime(B + 1);
  const std::uint64_t K = std::max<std::uint64_t>(1, n / (B * p));
  return {K, B, p, seed};
}

inline diu_instance gen_hard_diu(std::uint64_t n, double eps, std::uint64_t seed) {
  const hard_dist_params params = solve_diu_params(n, eps, seed);
  diu_instance out;
  out.K = params.K;
  out.B = params.B;
  out.p = params.p;
  out.n = params.K * params.B * params.p;
  out.bps_trace = gen_hard_bps(params);

  cell_memory mem;
  bps_via_diu<recording_union<segment_tree_union>> adapter(mem, {params.K, params.B, params.p});
  std::size_t seen = 0;
  for (std::size_t t = 0; t < out.bps_trace.size(); ++t) {
    mem.begin_op(t);
    if (const auto* u = std::get_if<bps_update_op>(&out.bps_trace[t])) {
      adapter.update(u->j, u->v);
      out.max_interval_ops_per_update =
          std::max(out.max_interval_ops_per_update, adapter.last_expansion().interval_ops());
    } else {
      const auto& q = std::get<bps_query_op>(out.bps_trace[t]);
      out.bps_answers.push_back(adapter.query(q.j));
      out.max_interval_ops_per_query =
          std::max(out.max_interval_ops_per_query, adapter.last_expansion().interval_ops());
    }
    const auto& events = adapter.inner().events();
    for (; seen < events.size(); ++seen) {
      const auto& e = events[seen];
      switch (e.what) {
        case union_event::kind::insert:
          out.diu_trace.emplace_back(insert_op{e.a, e.b});
          ++out.inserts;
          break;
        case union_event::kind::erase:
          out.diu_trace.emplace_back(delete_op{e.a, e.b});
          ++out.deletes;
          break;
        case union_event::kind::query:
          out.diu_trace.emplace_back(query_op{});
          ++out.queries;
          break;
      }
    }
  }
  return out;
}

// Counting identities over a probe log of a 2B-operation hard-sequence run.
struct audit_row {
  dyadic_label s;
  std::uint64_t size_p0 = 0;        // |P_{s0}|
  std::uint64_t size_p1 = 0;        // |P_{s1}|
  std::uint64_t intersection = 0;   // |P_{s0} ∩ P_{s1}| by set intersection
  std::uint64_t referrals = 0;      // first probes in I_{s1} whose previous probe is in I_{s0}
};

struct audit_report {
  unsigned b = 0;
  std::uint64_t total_probes = 0;  // T
  std::vector<audit_row> rows;
  std::uint64_t sum_sizes = 0;      // sum_s |P_{s0}| + |P_{s1}|
  std::uint64_t sum_referrals = 0;  // sum_s referrals_s
  bool sizes_identity = false;      // sum_sizes <= T * b
  bool referral_identity = false;   // sum_referrals <= T
  bool referrals_match_intersections = false;

  std::uint64_t sizes_slack() const { return total_probes * b - sum_sizes; }
  std::uint64_t referral_slack() const { return total_probes - sum_referrals; }
};

inline audit_report counting_audit(const probe_log& log, unsigned b) {
  if (b == 0 || b > 40) throw config_error("counting_audit: b must be in [1, 40]");
  const std::uint64_t ops = std::uint64_t{2} << b;
  if (log.op_count() != ops)
    throw shape_error("counting_audit: log covers " + std::to_string(log.op_count()) + " operations, expected 2B = " +
                      std::to_string(ops));
  audit_report rep;
  rep.b = b;
  rep.total_probes = log.size();

  // Referrals: a probe at pair index t whose previous probe of the same cell
  // was at t' < t is referred to s = longest common prefix of t' and t.
  std::vector<std::uint64_t> referral_count(std::uint64_t{1} << b, 0);  // heap-indexed by label
  auto heap_index = [](const dyadic_label& s) { return (std::uint64_t{1} << s.length) - 1 + s.value; };
  {
    std::unordered_map<address, std::uint64_t> last_t;
    for (const auto& r : log.entries()) {
      const std::uint64_t t = r.op_index / 2;
      auto [it, fresh] = last_t.try_emplace(r.addr, t);
      if (!fresh) {
        const std::uint64_t prev = it->second;
        if (prev < t) {
          const unsigned high = floor_log2(prev ^ t);  // first differing bit from the top
          const unsigned len = b - 1 - high;
          referral_count[heap_index({len, t >> (high + 1)})]++;
        }
        it->second = t;
      }
    }
  }

  for (unsigned len = 0; len < b; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      const dyadic_label s{len, v};
      const auto [a0, a1] = s.child(0).op_range(b);
      const auto [b0, b1] = s.child(1).op_range(b);
      const auto p0 = probe_set(log, a0, a1);
      const auto p1 = probe_set(log, b0, b1);
      std::vector<address> both;
      std::set_intersection(p0.begin(), p0.end(), p1.begin(), p1.end(), std::back_inserter(both));
      audit_row row{s, p0.size(), p1.size(), both.size(), referral_count[heap_index(s)]};
      rep.sum_sizes += row.size_p0 + row.size_p1;
      rep.sum_referrals += row.referrals;
      rep.rows.push_back(row);
    }
  }
  rep.sizes_identity = rep.sum_sizes <= rep.total_probes * b;
  rep.referral_identity = rep.sum_referrals <= rep.total_probes;
  rep.referrals_match_intersections = true;
  for (const auto& row : rep.rows)
    if (row.referrals != row.intersection) rep.referrals_match_intersections = false;
  return rep;
}

inline nlohmann::json to_json(const audit_report& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"s", r.s.str()},
                    {"size_p0", r.size_p0},
                    {"size_p1", r.size_p1},
                    {"intersection", r.intersection},
                    {"referrals", r.referrals}});
  return {{"b", rep.b},
          {"total_probes", rep.total_probes},
          {"sum_sizes", rep.sum_sizes},
          {"sizes_bound", rep.total_probes * rep.b},
          {"sum_referrals", rep.sum_referrals},
          {"sizes_identity", rep.sizes_identity},
          {"referral_identity", rep.referral_identity},
          {"referrals_match_intersections", rep.referrals_match_intersections},
          {"rows", rows}};
}

}  // namespace probelab
