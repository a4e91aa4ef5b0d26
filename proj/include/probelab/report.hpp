#pragma once

// Probe statistics for a finished run.

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "operations.hpp"
#include "probe_memory.hpp"

namespace probelab {

struct op_probe_row {
  std::uint64_t op_index = 0;
  std::string op_kind;
  std::uint64_t probes = 0;
};

struct kind_summary {
  std::uint64_t ops = 0;
  std::uint64_t probes = 0;
  std::uint64_t max_probes = 0;
  double mean() const noexcept { return ops ? static_cast<double>(probes) / static_cast<double>(ops) : 0.0; }
};

inline std::vector<op_probe_row> per_op_probes(const operation_sequence& ops, const probe_log& log) {
  std::vector<op_probe_row> rows;
  rows.reserve(ops.size());
  const auto counts = log.probes_per_op();
  for (std::size_t t = 0; t < ops.size(); ++t)
    rows.push_back({t, op_name(ops[t]), t < counts.size() ? counts[t] : 0});
  return rows;
}

inline std::map<std::string, kind_summary> summarize(const std::vector<op_probe_row>& rows) {
  std::map<std::string, kind_summary> out;
  for (const auto& r : rows) {
    auto& s = out[r.op_kind];
    ++s.ops;
    s.probes += r.probes;
    s.max_probes = std::max(s.max_probes, r.probes);
  }
  return out;
}

inline void write_per_op_csv(std::ostream& os, const std::vector<op_probe_row>& rows) {
  os << "op_index,op_kind,probes\n";
  for (const auto& r : rows) os << r.op_index << ',' << r.op_kind << ',' << r.probes << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::map<std::string, kind_summary>& summary) {
  os << "op_kind,ops,total_probes,mean_probes,max_probes\n";
  for (const auto& [kind, s] : summary)
    os << kind << ',' << s.ops << ',' << s.probes << ',' << s.mean() << ',' << s.max_probes << '\n';
}

// Least-squares fit y = a + b x.
struct line_fit {
  double intercept = 0;
  double slope = 0;
};

inline line_fit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0) return {n ? sy / n : 0, 0};
  const double slope = (n * sxy - sx * sy) / den;
  return {(sy - slope * sx) / n, slope};
}

// Least-squares slope of y = c x (through the origin).
inline double fit_through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return sxx == 0 ? 0 : sxy / sxx;
}

}  // namespace probelab
