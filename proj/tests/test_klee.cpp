#include <gtest/gtest.h>

#include <sstream>

#include "probelab.hpp"

using namespace probelab;

namespace {

std::vector<rect> random_rects(splitmix64& rng, std::size_t count, std::uint64_t coord_max) {
  std::vector<rect> out;
  for (std::size_t i = 0; i < count; ++i) {
    rect r{rng.between(0, coord_max), rng.between(0, coord_max), rng.between(0, coord_max), rng.between(0, coord_max)};
    if (r.x1 > r.x2) std::swap(r.x1, r.x2);
    if (r.y1 > r.y2) std::swap(r.y1, r.y2);
    out.push_back(r);
  }
  return out;
}

std::uint64_t sweep(const std::vector<rect>& rects, std::uint64_t n) {
  cell_memory mem;
  segment_tree_union ds(mem, n);
  return klee_area(rects, ds).area;
}

}  // namespace

TEST(Klee, Examples) {
  EXPECT_EQ(sweep({{0, 2, 0, 2}, {1, 3, 1, 3}}, 3), 7u);
  std::vector<rect> squares;
  for (std::uint64_t i = 0; i < 50; ++i) squares.push_back({2 * i, 2 * i + 1, i, i + 1});
  EXPECT_EQ(sweep(squares, 100), 50u);
  EXPECT_EQ(sweep({}, 10), 0u);
}

TEST(Klee, ZeroAreaRectanglesAreLegal) {
  EXPECT_EQ(sweep({{3, 3, 0, 5}, {0, 5, 2, 2}, {1, 2, 1, 2}}, 5), 1u);
}

TEST(Klee, InvalidRectangles) {
  EXPECT_THROW(sweep({{2, 1, 0, 1}}, 5), range_error);
  EXPECT_THROW(sweep({{0, 6, 0, 1}}, 5), range_error);
  EXPECT_THROW(klee_oracle({{0, 2000, 0, 1}}), config_error);
  EXPECT_THROW(klee_oracle({{3, 2, 0, 1}}), range_error);
}

TEST(Klee, OracleExamples) {
  EXPECT_EQ(klee_oracle({}), 0u);
  EXPECT_EQ(klee_oracle({{3, 10, 4, 6}}), 14u);
  EXPECT_EQ(klee_oracle({{0, 1024, 0, 1024}}), 1024u * 1024u);
}

TEST(Klee, OracleIsOrderIndependent) {
  splitmix64 rng(1);
  auto rects = random_rects(rng, 50, 200);
  const auto base = klee_oracle(rects);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = rects.size() - 1; i > 0; --i) std::swap(rects[i], rects[rng.below(i + 1)]);
    ASSERT_EQ(klee_oracle(rects), base);
    ASSERT_EQ(sweep(rects, 200), base);
  }
}

TEST(Klee, SweepMatchesOracleBothBackends) {
  splitmix64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rects = random_rects(rng, rng.between(0, 100), 256);
    const auto expect = klee_oracle(rects);
    cell_memory m1, m2;
    segment_tree_union st(m1, 256);
    naive_bitmap_union nb(m2, 256);
    const auto a = klee_area(rects, st), b = klee_area(rects, nb);
    ASSERT_EQ(a.area, expect);
    ASSERT_EQ(b.area, expect);
    ASSERT_EQ(a.inserts, rects.size());
    ASSERT_EQ(a.deletes, rects.size());
    std::set<std::uint64_t> xs;
    for (const auto& r : rects) xs.insert(r.x1), xs.insert(r.x2);
    ASSERT_EQ(a.queries, xs.size());
  }
}

TEST(Klee, LargeCoordinatesDoNotOverflow) {
  const std::uint64_t n = std::uint64_t{1} << 20;
  cell_memory mem;
  segment_tree_union ds(mem, n);
  EXPECT_EQ(klee_area(std::vector<rect>{{0, n, 0, n}, {5, 9, 5, 9}}, ds).area, n * n);
}

TEST(Klee, CsvInput) {
  std::istringstream in("# x1,x2,y1,y2\n0,2,0,2\n\n1, 3, 1, 3\n");
  const auto rects = read_rects_csv(in);
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[1], (rect{1, 3, 1, 3}));
  std::istringstream bad("0,2,0\n");
  try {
    read_rects_csv(bad);
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream neg("0,2,0,2\n0,-2,0,2\n");
  EXPECT_THROW(read_rects_csv(neg), parse_error);
}
