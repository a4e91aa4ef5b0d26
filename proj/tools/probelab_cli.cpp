// probelab: command-line harness.
//
//   probelab gen         --kind bps|diu ... --seed N --out trace.jsonl
//   probelab run         --trace trace.jsonl --backend NAME [--answers a.jsonl --probes p.csv ...]
//   probelab klee        --rects rects.csv --n N [--backend NAME] [--stats stats.json]
//   probelab commgame    --trace trace.jsonl --p P --split s --backend NAME --seed N [--corrupt flip:k]
//   probelab audit       --log probes.csv --B B   |   --trace trace.jsonl --p P --backend NAME
//   probelab disjointness --k 16,32,... --trials T --seed N
//   probelab fuzz        --target diu|bps|game|disjointness --trials T --seed N
//
// Exit status: 0 on success, 2 on invalid input or parameters, 3 when an
// internal invariant breaks. Relative output paths are placed under
// $PROBELAB_OUT_DIR when it is set.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "probelab.hpp"

namespace fs = std::filesystem;
using namespace probelab;

namespace {

fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative())
    if (const char* dir = std::getenv("PROBELAB_OUT_DIR"); dir && *dir) return fs::path(dir) / path;
  return path;
}

std::ofstream open_out(const std::string& p) {
  const fs::path path = output_path(p);
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::string& p) {
  std::ifstream in(p);
  if (!in) throw io_error("cannot read " + p);
  return in;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

operation_sequence load_trace(const std::string& path) {
  auto in = open_in(path);
  return read_trace(in);
}

bool is_bps_trace(const operation_sequence& ops) {
  if (ops.empty()) return false;
  const bool bps = !is_interval_op(ops.front());
  for (const auto& op : ops)
    if (is_interval_op(op) == bps) throw shape_error("trace mixes interval-union and batch-partial-sum operations");
  return bps;
}

// ---------------------------------------------------------------- gen

struct gen_options {
  std::string kind = "bps";
  std::uint64_t K = 4, B = 16, p = 0, n = 4096;
  double eps = 0.5;
  std::uint64_t seed = 0;
  std::string out = "trace.jsonl";
  std::string meta;
};

int cmd_gen(const gen_options& o) {
  nlohmann::json meta;
  if (o.kind == "bps") {
    const hard_dist_params params{o.K, o.B, o.p ? o.p : next_prime(o.B), o.seed};
    const auto ops = gen_hard_bps(params);
    auto out = open_out(o.out);
    write_trace(out, ops);
    meta = {{"kind", "bps"}, {"K", params.K}, {"B", params.B}, {"p", params.p}, {"seed", o.seed},
            {"operations", ops.size()}};
  } else if (o.kind == "diu") {
    const auto inst = gen_hard_diu(o.n, o.eps, o.seed);
    auto out = open_out(o.out);
    write_trace(out, inst.diu_trace);
    meta = {{"kind", "diu"},          {"K", inst.K},           {"B", inst.B},
            {"p", inst.p},            {"n_used", inst.n},      {"seed", o.seed},
            {"inserts", inst.inserts}, {"deletes", inst.deletes}, {"queries", inst.queries}};
  } else {
    throw config_error("--kind must be bps or diu");
  }
  write_json(o.meta, meta);
  return 0;
}

// ---------------------------------------------------------------- run

struct run_options {
  std::string trace;
  std::string backend = "segment_tree";
  std::optional<std::uint64_t> n, B, p;
  unsigned w = 64;
  std::string answers = "answers.jsonl";
  std::string probes, summary, probe_log;
};

int cmd_run(const run_options& o) {
  const auto ops = load_trace(o.trace);
  cell_memory mem(o.w);
  std::vector<std::uint64_t> answers;

  if (!is_bps_trace(ops)) {
    std::uint64_t n = 1;
    for (const auto& op : ops) {
      if (const auto* i = std::get_if<insert_op>(&op)) n = std::max(n, i->b);
      if (const auto* d = std::get_if<delete_op>(&op)) n = std::max(n, d->b);
    }
    auto ds = make_interval_union(o.backend, mem, o.n.value_or(n));
    for (std::size_t t = 0; t < ops.size(); ++t) {
      mem.begin_op(t);
      if (const auto* i = std::get_if<insert_op>(&ops[t])) ds->insert(i->a, i->b);
      else if (const auto* d = std::get_if<delete_op>(&ops[t])) ds->erase(d->a, d->b);
      else answers.push_back(ds->query());
    }
  } else {
    if (!o.p) throw config_error("run: batch-partial-sum traces need --p");
    std::uint64_t K = 0, B = 1;
    for (const auto& op : ops) {
      const auto& j = op.index() == 3 ? std::get<bps_update_op>(op).j : std::get<bps_query_op>(op).j;
      K = j.size();
      for (auto x : j) B = std::max(B, x);
    }
    auto ds = make_bps_structure(o.backend, mem, {K, o.B.value_or(B), *o.p});
    for (std::size_t t = 0; t < ops.size(); ++t) {
      mem.begin_op(t);
      if (const auto* u = std::get_if<bps_update_op>(&ops[t])) ds->update(u->j, u->v);
      else answers.push_back(ds->query(std::get<bps_query_op>(ops[t]).j));
    }
  }

  {
    auto out = open_out(o.answers);
    write_answers(out, answers);
  }
  const auto rows = per_op_probes(ops, mem.log());
  if (!o.probes.empty()) {
    auto out = open_out(o.probes);
    write_per_op_csv(out, rows);
  }
  if (!o.summary.empty()) {
    auto out = open_out(o.summary);
    write_summary_csv(out, summarize(rows));
  }
  if (!o.probe_log.empty()) {
    auto out = open_out(o.probe_log);
    write_probe_log_csv(out, mem.log());
  }
  return 0;
}

// ---------------------------------------------------------------- klee

struct klee_options {
  std::string rects;
  std::uint64_t n = 1024;
  std::string backend = "segment_tree";
  std::string stats;
};

int cmd_klee(const klee_options& o) {
  auto in = open_in(o.rects);
  const auto rects = read_rects_csv(in);
  cell_memory mem;
  klee_result r;
  if (o.backend == "segment_tree") {
    segment_tree_union ds(mem, o.n);
    r = klee_area(rects, ds);
  } else if (o.backend == "naive_bitmap") {
    naive_bitmap_union ds(mem, o.n);
    r = klee_area(rects, ds);
  } else {
    throw config_error("klee: --backend must be segment_tree or naive_bitmap");
  }
  std::cout << r.area << '\n';
  if (!o.stats.empty())
    write_json(o.stats, {{"rects", rects.size()},
                         {"n", o.n},
                         {"area", r.area},
                         {"inserts", r.inserts},
                         {"deletes", r.deletes},
                         {"queries", r.queries},
                         {"probes", mem.log().size()}});
  return 0;
}

// ---------------------------------------------------------------- commgame

struct commgame_options {
  std::string trace;
  std::uint64_t p = 0;
  std::string split;
  std::string backend = "segment_tree";
  std::uint64_t seed = 0;
  unsigned w = 64;
  std::string corrupt;
  std::string out;
};

int cmd_commgame(const commgame_options& o) {
  const auto ops = load_trace(o.trace);
  const game_setup setup(ops, bps_factory(o.backend), o.p, dyadic_label::parse(o.split), o.w);
  merlin_message z = setup.truthful_message();
  if (!o.corrupt.empty()) z = corrupt_message(std::move(z), o.corrupt);
  const auto outcome = setup.play(z, o.seed);
  auto j = to_json(outcome);
  j["split"] = o.split;
  j["message_bits"] = z.size();
  j["corruption"] = o.corrupt.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.corrupt);
  j["size_p_a"] = setup.alice_probes().size();
  j["size_p_b"] = setup.bob_probes().size();
  j["size_p_a_and_p_b"] = setup.shared_probes().size();
  j["cost_measure"] = setup.cost_measure();
  j["cost_constant"] = game_cost_constant;
  j["within_bound"] = static_cast<double>(outcome.ledger.total()) <=
                      game_cost_constant * static_cast<double>(setup.cost_measure());
  if (outcome.accepted()) j["answers_match_monolithic"] = outcome.answers == setup.reference_answers();
  write_json(o.out, j);
  return 0;
}

// ---------------------------------------------------------------- audit

struct audit_options {
  std::string log;
  std::uint64_t B = 0;
  std::string trace;
  std::uint64_t p = 0;
  std::string backend = "segment_tree";
  std::string out;
};

probe_log read_probe_log_csv(std::istream& in) {
  probe_log log;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (line == 1) {
      if (text != "op_index,kind,address") throw parse_error("expected header op_index,kind,address", line);
      continue;
    }
    if (text.empty()) continue;
    std::stringstream ss(text);
    std::string op, kind, addr;
    if (!std::getline(ss, op, ',') || !std::getline(ss, kind, ',') || !std::getline(ss, addr))
      throw parse_error("expected 3 fields", line);
    if (kind != "read" && kind != "write") throw parse_error("kind must be read or write", line);
    try {
      if (op.empty() || addr.empty() || op[0] == '-' || addr[0] == '-') throw std::invalid_argument("sign");
      std::size_t u1 = 0, u2 = 0;
      const auto t = std::stoull(op, &u1);
      const auto a = std::stoull(addr, &u2);
      if (u1 != op.size() || u2 != addr.size()) throw std::invalid_argument("trailing");
      log.append({t, kind == "read" ? probe_kind::read : probe_kind::write, a});
    } catch (const invariant_violation&) {
      throw parse_error("op_index decreases", line);
    } catch (const std::exception&) {
      throw parse_error("op_index and address must be nonnegative integers", line);
    }
  }
  return log;
}

int cmd_audit(const audit_options& o) {
  probe_log log;
  std::uint64_t B = o.B;
  if (!o.trace.empty()) {
    const auto ops = load_trace(o.trace);
    B = hard_sequence_length(ops);
    const auto shape = inspect_hard_trace(ops);
    cell_memory mem;
    auto ds = make_bps_structure(o.backend, mem, {shape.K, shape.B, o.p});
    for (std::size_t t = 0; t < ops.size(); ++t) {
      mem.begin_op(t);
      detail::apply_op(*ds, ops[t]);
    }
    log = mem.log();
  } else {
    if (o.log.empty() || B == 0) throw config_error("audit: give --trace, or --log together with --B");
    auto in = open_in(o.log);
    log = read_probe_log_csv(in);
    log.note_op(2 * B - 1);  // the final operation may issue no probe
  }
  if (!is_power_of_two(B)) throw config_error("audit: B must be a power of two");
  const auto rep = counting_audit(log, floor_log2(B));
  write_json(o.out, to_json(rep));
  return 0;
}

// ---------------------------------------------------------------- disjointness

struct disjointness_options {
  std::vector<std::uint64_t> ks{16, 32, 64, 128, 256, 512, 1024};
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  unsigned universe_bits = 64;
  bool intersecting = false;
  std::string out;
};

// Random pair of k-element sets, disjoint unless `intersecting`.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> random_pair(splitmix64& rng, std::uint64_t k,
                                                                              unsigned universe_bits,
                                                                              bool intersecting) {
  const std::uint64_t mask = universe_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << universe_bits) - 1;
  std::set<std::uint64_t> used;
  auto fresh = [&] {
    for (;;) {
      const std::uint64_t e = rng() & mask;
      if (used.insert(e).second) return e;
    }
  };
  std::vector<std::uint64_t> S, T;
  for (std::uint64_t i = 0; i < k; ++i) S.push_back(fresh());
  for (std::uint64_t i = 0; i < k; ++i) T.push_back(fresh());
  if (intersecting && k > 0) T[rng.below(k)] = S[rng.below(k)];
  return {S, T};
}

int cmd_disjointness(const disjointness_options& o) {
  splitmix64 rng(o.seed);
  std::ostringstream csv;
  csv << "k,trials,mean_bits,max_bits,errors\n";
  std::uint64_t errors = 0;
  for (auto k : o.ks) {
    if (o.universe_bits < 64 && (std::uint64_t{1} << o.universe_bits) < 2 * k)
      throw config_error("disjointness: universe too small for two disjoint " + std::to_string(k) + "-sets");
    std::uint64_t sum = 0, worst = 0, wrong = 0;
    for (std::uint64_t t = 0; t < o.trials; ++t) {
      auto [S, T] = random_pair(rng, k, o.universe_bits, o.intersecting);
      const auto r = sparse_set_disjointness(S, T, o.universe_bits, rng());
      sum += r.bits_used;
      worst = std::max(worst, r.bits_used);
      if (r.disjoint == o.intersecting) ++wrong;
    }
    errors += wrong;
    csv << k << ',' << o.trials << ',' << (o.trials ? static_cast<double>(sum) / o.trials : 0.0) << ',' << worst
        << ',' << wrong << '\n';
  }
  if (o.out.empty() || o.out == "-") {
    std::cout << csv.str();
  } else {
    auto out = open_out(o.out);
    out << csv.str();
  }
  if (errors) throw invariant_violation("disjointness: " + std::to_string(errors) + " wrong verdicts");
  return 0;
}

// ---------------------------------------------------------------- fuzz

struct fuzz_options {
  std::string target = "diu";
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  std::string out;
};

std::uint64_t fuzz_diu(splitmix64& rng, std::uint64_t trials) {
  std::uint64_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t n = rng.between(1, 64);
    cell_memory m1, m2;
    segment_tree_union st(m1, n);
    naive_bitmap_union nb(m2, n);
    std::vector<std::uint64_t> cover(n, 0);
    std::vector<interval> live;
    for (int step = 0; step < 200; ++step) {
      const auto roll = rng.below(10);
      if (roll < 5 || live.empty()) {
        std::uint64_t a = rng.between(0, n), b = rng.between(0, n);
        if (a > b) std::swap(a, b);
        st.insert(a, b);
        nb.insert(a, b);
        for (auto k = a; k < b; ++k) ++cover[k];
        live.push_back({a, b});
      } else if (roll < 8) {
        const auto idx = rng.below(live.size());
        const auto iv = live[idx];
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
        st.erase(iv.a, iv.b);
        nb.erase(iv.a, iv.b);
        for (auto k = iv.a; k < iv.b; ++k) --cover[k];
      } else {
        const auto expect = static_cast<std::uint64_t>(std::count_if(cover.begin(), cover.end(), [](auto c) { return c > 0; }));
        if (st.query() != expect || nb.query() != expect) ++mismatches;
      }
    }
  }
  return mismatches;
}

std::uint64_t fuzz_bps(splitmix64& rng, std::uint64_t trials) {
  std::uint64_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t K = rng.between(1, 4), B = std::uint64_t{1} << rng.between(1, 5);
    const std::uint64_t p = next_prime(B + rng.below(20));
    const auto ops = gen_hard_bps({K, B, p, rng()});
    cell_memory m1, m2;
    fp_sequence_bank bank(m1, {K, B, p});
    bps_via_diu<segment_tree_union> red(m2, {K, B, p});
    for (const auto& op : ops) {
      if (const auto* u = std::get_if<bps_update_op>(&op)) {
        bank.update(u->j, u->v);
        red.update(u->j, u->v);
      } else {
        const auto& q = std::get<bps_query_op>(op);
        if (bank.query(q.j) != red.query(q.j)) ++mismatches;
      }
    }
  }
  return mismatches;
}

std::uint64_t fuzz_game(splitmix64& rng, std::uint64_t trials) {
  const auto ops = gen_hard_bps({2, 16, 17, rng()});
  const game_setup setup(ops, bps_factory("segment_tree"), 17, dyadic_label::parse(""));
  const auto& z = setup.truthful_message();
  std::uint64_t mismatches = 0;
  const auto honest = setup.play(z, rng());
  if (!honest.accepted() || honest.answers != setup.reference_answers()) ++mismatches;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    merlin_message bad = z;
    switch (rng.below(3)) {
      case 0: {
        const auto flips = rng.between(1, 3);
        std::set<std::uint64_t> at;
        while (at.size() < flips) at.insert(rng.below(bad.size()));
        for (auto k : at) bad[k] = !bad[k];
        break;
      }
      case 1: bad.resize(bad.size() - rng.between(1, bad.size())); break;
      default:
        for (auto extra = rng.between(1, 8); extra > 0; --extra) bad.push_back(rng.below(2) == 1);
    }
    if (setup.play(bad, rng()).accepted()) ++mismatches;
  }
  return mismatches;
}

std::uint64_t fuzz_disjointness(splitmix64& rng, std::uint64_t trials) {
  std::uint64_t mismatches = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<std::uint64_t> S, T;
    const auto universe = rng.between(1, 200);
    for (auto i = rng.below(20); i > 0; --i) S.push_back(rng.below(universe));
    for (auto i = rng.below(20); i > 0; --i) T.push_back(rng.below(universe));
    std::set<std::uint64_t> s(S.begin(), S.end());
    const bool truth = std::none_of(T.begin(), T.end(), [&](auto e) { return s.count(e) > 0; });
    if (sparse_set_disjointness(S, T, 8, rng()).disjoint != truth) ++mismatches;
  }
  return mismatches;
}

int cmd_fuzz(const fuzz_options& o) {
  splitmix64 rng(o.seed);
  std::uint64_t mismatches = 0;
  if (o.target == "diu") mismatches = fuzz_diu(rng, o.trials);
  else if (o.target == "bps") mismatches = fuzz_bps(rng, o.trials);
  else if (o.target == "game") mismatches = fuzz_game(rng, o.trials);
  else if (o.target == "disjointness") mismatches = fuzz_disjointness(rng, o.trials);
  else throw config_error("fuzz: --target must be diu, bps, game or disjointness");
  write_json(o.out, {{"target", o.target}, {"trials", o.trials}, {"seed", o.seed}, {"mismatches", mismatches}});
  if (mismatches) throw invariant_violation("fuzz: " + std::to_string(mismatches) + " mismatches");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probelab: cell-probe experiments on interval union and batch partial sum"};
  app.require_subcommand(1);

  gen_options gen;
  auto* g = app.add_subcommand("gen", "sample a hard trace");
  g->add_option("--kind", gen.kind, "bps or diu")->check(CLI::IsMember({"bps", "diu"}));
  g->add_option("--K", gen.K, "number of sequences (bps)");
  g->add_option("--B", gen.B, "sequence length, a power of two (bps)");
  g->add_option("--p", gen.p, "prime modulus >= B (bps; default smallest prime >= B)");
  g->add_option("--n", gen.n, "universe bound (diu)");
  g->add_option("--eps", gen.eps, "exponent in (0,1) (diu)");
  g->add_option("--seed", gen.seed, "RNG seed")->required();
  g->add_option("--out", gen.out, "trace path (JSONL)");
  g->add_option("--meta", gen.meta, "parameter report path (JSON; default stdout)");

  run_options run;
  auto* r = app.add_subcommand("run", "execute a trace on a backend");
  r->add_option("--trace", run.trace, "trace path (JSONL)")->required();
  r->add_option("--backend", run.backend, "segment_tree, naive_bitmap, fenwick, scc, shortest_path, mincost_flow");
  r->add_option("--n", run.n, "interval universe (default: largest endpoint)");
  r->add_option("--B", run.B, "sequence length (default: largest index)");
  r->add_option("--p", run.p, "prime modulus (batch-partial-sum traces)");
  r->add_option("--w", run.w, "word size in bits");
  r->add_option("--answers", run.answers, "answers path (JSONL)");
  r->add_option("--probes", run.probes, "per-operation probe CSV");
  r->add_option("--summary", run.summary, "aggregate probe CSV");
  r->add_option("--probe-log", run.probe_log, "raw probe log CSV");

  klee_options klee;
  auto* k = app.add_subcommand("klee", "area of a union of rectangles");
  k->add_option("--rects", klee.rects, "CSV of x1,x2,y1,y2")->required();
  k->add_option("--n", klee.n, "coordinate bound");
  k->add_option("--backend", klee.backend, "segment_tree or naive_bitmap");
  k->add_option("--stats", klee.stats, "probe statistics path (JSON)");

  commgame_options cg;
  auto* c = app.add_subcommand("commgame", "play the Merlin-assisted game on a hard trace");
  c->add_option("--trace", cg.trace, "hard bps trace (JSONL)")->required();
  c->add_option("--p", cg.p, "prime modulus used to generate the trace")->required();
  c->add_option("--split", cg.split, "dyadic label s; I_A = I_s0, I_B = I_s1")->required();
  c->add_option("--backend", cg.backend, "fenwick, segment_tree or naive_bitmap");
  c->add_option("--seed", cg.seed, "shared randomness seed")->required();
  c->add_option("--w", cg.w, "word size in bits");
  c->add_option("--corrupt", cg.corrupt, "flip:k, truncate:k or extend:k");
  c->add_option("--out", cg.out, "report path (JSON; default stdout)");

  audit_options au;
  auto* a = app.add_subcommand("audit", "check the probe counting identities");
  a->add_option("--log", au.log, "probe log CSV of a hard-trace run");
  a->add_option("--B", au.B, "B of the run that produced --log");
  a->add_option("--trace", au.trace, "hard bps trace to run and audit");
  a->add_option("--p", au.p, "prime modulus (with --trace)");
  a->add_option("--backend", au.backend, "backend (with --trace)");
  a->add_option("--out", au.out, "report path (JSON; default stdout)");

  disjointness_options dj;
  auto* d = app.add_subcommand("disjointness", "measure the set disjointness protocol");
  d->add_option("--k", dj.ks, "set sizes")->delimiter(',');
  d->add_option("--trials", dj.trials, "pairs per size");
  d->add_option("--seed", dj.seed, "RNG seed")->required();
  d->add_option("--universe-bits", dj.universe_bits, "bits per element")->check(CLI::Range(1, 64));
  d->add_flag("--intersecting", dj.intersecting, "plant one common element");
  d->add_option("--out", dj.out, "CSV path (default stdout)");

  fuzz_options fz;
  auto* f = app.add_subcommand("fuzz", "randomized oracle comparisons");
  f->add_option("--target", fz.target, "diu, bps, game or disjointness");
  f->add_option("--trials", fz.trials, "number of trials");
  f->add_option("--seed", fz.seed, "RNG seed")->required();
  f->add_option("--out", fz.out, "report path (JSON; default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*k) return cmd_klee(klee);
    if (*c) return cmd_commgame(cg);
    if (*a) return cmd_audit(au);
    if (*d) return cmd_disjointness(dj);
    if (*f) return cmd_fuzz(fz);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const invariant_violation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
