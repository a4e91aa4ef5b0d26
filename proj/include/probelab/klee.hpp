#pragma once

// Area of a union of axis-parallel rectangles in [0, n]^2 by a vertical sweep:
// a rectangle enters the interval union as [y1, y2] at x1 and leaves at x2;
// between consecutive event columns the covered length is constant.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval_union.hpp"

namespace probelab {

// Measured ceiling on probes / (N log2 n) for a segment-tree sweep; see README.
inline constexpr double klee_probe_constant = 16.0;

struct rect {
  std::uint64_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  friend bool operator==(const rect&, const rect&) = default;
};

inline void check_rect(const rect& r, std::uint64_t n) {
  if (r.x1 > r.x2 || r.y1 > r.y2 || r.x2 > n || r.y2 > n)
    throw range_error("rect [" + std::to_string(r.x1) + "," + std::to_string(r.x2) + "]x[" + std::to_string(r.y1) +
                      "," + std::to_string(r.y2) + "] not inside [0," + std::to_string(n) + "]^2");
}

struct klee_result {
  std::uint64_t area = 0;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;
  std::uint64_t queries = 0;
};

template <interval_union Backend>
klee_result klee_area(const std::vector<rect>& rects, Backend& ds) {
  const std::uint64_t n = ds.universe();
  for (const auto& r : rects) check_rect(r, n);

  struct event {
    std::uint64_t x;
    bool leaving;  // false sorts first: insertions before deletions at equal x
    std::uint64_t y1, y2;
  };
  std::vector<event> events;
  events.reserve(2 * rects.size());
  for (const auto& r : rects) {
    events.push_back({r.x1, false, r.y1, r.y2});
    events.push_back({r.x2, true, r.y1, r.y2});
  }
  std::sort(events.begin(), events.end(), [](const event& a, const event& b) {
    return a.x != b.x ? a.x < b.x : a.leaving < b.leaving;
  });

  klee_result out;
  unsigned __int128 area = 0;
  for (std::size_t i = 0; i < events.size();) {
    const std::uint64_t x = events[i].x;
    for (; i < events.size() && events[i].x == x; ++i) {
      if (events[i].leaving) {
        ds.erase(events[i].y1, events[i].y2);
        ++out.deletes;
      } else {
        ds.insert(events[i].y1, events[i].y2);
        ++out.inserts;
      }
    }
    const std::uint64_t covered = ds.query();
    ++out.queries;
    if (i < events.size()) area += static_cast<unsigned __int128>(covered) * (events[i].x - x);
  }
  if (area > ~std::uint64_t{0}) throw invariant_violation("klee: area exceeds 64 bits");
  out.area = static_cast<std::uint64_t>(area);
  return out;
}

// Paints unit cells of a grid; coordinates may not exceed `cap`.
inline std::uint64_t klee_oracle(const std::vector<rect>& rects, std::uint64_t cap = 1024) {
  std::uint64_t X = 0, Y = 0;
  for (const auto& r : rects) {
    if (r.x1 > r.x2 || r.y1 > r.y2) throw range_error("klee_oracle: inverted rectangle");
    if (r.x2 > cap || r.y2 > cap)
      throw config_error("klee_oracle: coordinate exceeds the grid cap " + std::to_string(cap));
    X = std::max(X, r.x2);
    Y = std::max(Y, r.y2);
  }
  std::vector<bool> painted(X * Y, false);
  for (const auto& r : rects)
    for (std::uint64_t x = r.x1; x < r.x2; ++x)
      for (std::uint64_t y = r.y1; y < r.y2; ++y) painted[x * Y + y] = true;
  return static_cast<std::uint64_t>(std::count(painted.begin(), painted.end(), true));
}

// CSV lines x1,x2,y1,y2; blank lines and lines starting with '#' are skipped.
inline std::vector<rect> read_rects_csv(std::istream& in) {
  std::vector<rect> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos || text[0] == '#') continue;
    rect r;
    std::uint64_t* fields[] = {&r.x1, &r.x2, &r.y1, &r.y2};
    std::size_t pos = 0;
    for (int f = 0; f < 4; ++f) {
      while (pos < text.size() && text[pos] == ' ') ++pos;
      std::size_t used = 0;
      try {
        if (pos >= text.size() || text[pos] == '-') throw std::invalid_argument("sign");
        *fields[f] = std::stoull(text.substr(pos), &used);
      } catch (const std::exception&) {
        throw parse_error("expected 4 nonnegative integers x1,x2,y1,y2", line);
      }
      pos += used;
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\r')) ++pos;
      if (f < 3) {
        if (pos >= text.size() || text[pos] != ',') throw parse_error("expected 4 comma-separated fields", line);
        ++pos;
      }
    }
    if (pos != text.size()) throw parse_error("trailing characters after 4 fields", line);
    out.push_back(r);
  }
  return out;
}

}  // namespace probelab
