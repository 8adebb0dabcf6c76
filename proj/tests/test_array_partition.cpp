#include <doctest.h>

#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include "tcs/array_partition.hpp"
#include "tcs/union_find.hpp"

using namespace tcs;

namespace {

// Breadth-first search over the "shares a subset with" relation.
std::vector<std::vector<CellId>> bfs_classes(const ArrayLayout& layout,
                                             const std::vector<Partition>& parts) {
  std::set<CellId> seen;
  std::vector<std::vector<CellId>> out;
  for (const CellId& start : layout.cells()) {
    if (seen.count(start)) continue;
    std::vector<CellId> cls;
    std::queue<CellId> q;
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
      const CellId c = q.front();
      q.pop();
      cls.push_back(c);
      for (const Partition& p : parts)
        for (const CellId& d : p.subsets()[p.subset_of(c)])
          if (seen.insert(d).second) q.push(d);
    }
    std::sort(cls.begin(), cls.end());
    out.push_back(cls);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("union find") {
  UnionFind uf(6);
  uf.unite(0, 1);
  uf.unite(2, 3);
  uf.unite(1, 3);
  CHECK(uf.find(0) == uf.find(2));
  CHECK(uf.find(4) != uf.find(0));
  CHECK(uf.find(5) == 5);
}

TEST_CASE("layouts") {
  const ArrayLayout t = ArrayLayout::triangle(15);
  CHECK(t.size() == 120);
  CHECK(t.contains({1, 15}));
  CHECK(t.contains({15, 1}));
  CHECK_FALSE(t.contains({2, 15}));
  CHECK_FALSE(t.contains({0, 1}));
  CHECK(ArrayLayout::full(3, 4).size() == 12);
  CHECK(std::is_sorted(t.cells().begin(), t.cells().end()));

  const ArrayLayout cut = t.without({{1, 1}, {3, 3}, {15, 15}});
  CHECK(cut.size() == 118);
  CHECK(cut.subset_of(t));
  CHECK_FALSE(t.subset_of(cut));
  CHECK(ArrayLayout::from_cells(15, 15, t.cells()) == t);
  CHECK_THROWS_AS(ArrayLayout::from_cells(2, 2, {{3, 1}}), InvalidPartition);
}

TEST_CASE("standard partitions on a triangle") {
  const ArrayLayout t = ArrayLayout::triangle(15);
  SUBCASE("diagonal-wise") {
    const Partition d = standard_partition(t, PartitionKind::diagonal_wise);
    REQUIRE(d.size() == 15);
    for (std::size_t k = 0; k < 15; ++k) {
      CHECK(d.subsets()[k].size() == k + 1);
      for (const CellId& c : d.subsets()[k]) CHECK(c.diagonal() == static_cast<int>(k) + 1);
    }
  }
  SUBCASE("row-wise") {
    const Partition r = standard_partition(t, PartitionKind::row_wise);
    REQUIRE(r.size() == 15);
    CHECK(r.subsets()[0].size() == 15);
    CHECK(r.subsets()[14].size() == 1);
    CHECK(r.subset_of({4, 2}) == 3);
  }
  SUBCASE("column-wise") {
    const Partition c = standard_partition(t, PartitionKind::column_wise);
    CHECK(c.size() == 15);
    CHECK(c.subset_of({4, 2}) == 1);
  }
  SUBCASE("cell-wise and array-wide") {
    CHECK(standard_partition(t, PartitionKind::cell_wise).size() == 120);
    const Partition w = standard_partition(t, PartitionKind::array_wide);
    CHECK(w.size() == 1);
    CHECK(w.subsets()[0].size() == 120);
  }
  CHECK_THROWS_AS(standard_partition(t, PartitionKind::custom), std::invalid_argument);
  CHECK_THROWS_AS(standard_partition(t, PartitionKind::row_wise).subset_of({15, 15}),
                  std::out_of_range);
}

TEST_CASE("partition kind names") {
  for (auto k : {PartitionKind::array_wide, PartitionKind::cell_wise, PartitionKind::row_wise,
                 PartitionKind::column_wise, PartitionKind::diagonal_wise, PartitionKind::custom})
    CHECK(parse_partition_kind(to_string(k)) == k);
  CHECK_FALSE(parse_partition_kind("zigzag").has_value());
}

TEST_CASE("split diagonals") {
  const ArrayLayout t = ArrayLayout::triangle(15);
  const Partition s = split_diagonal_partition(t, 10);
  CHECK(s.split_row() == 10);
  // Diagonals 1..15 above the split, 11..15 below it.
  REQUIRE(s.size() == 20);
  for (std::size_t k = 0; k < 15; ++k)
    for (const CellId& c : s.subsets()[k]) {
      CHECK(c.row <= 10);
      CHECK(c.diagonal() == static_cast<int>(k) + 1);
    }
  for (std::size_t k = 15; k < 20; ++k)
    for (const CellId& c : s.subsets()[k]) {
      CHECK(c.row > 10);
      CHECK(c.diagonal() == static_cast<int>(k) - 4);
    }
  CHECK(s.subsets()[15].size() == 1);
  CHECK(s.subsets()[19].size() == 5);
  CHECK(s.subsets()[14].size() == 10);
}

TEST_CASE("custom partition validation") {
  const ArrayLayout g = ArrayLayout::full(2, 2);
  CHECK_NOTHROW(custom_partition(g, {{{1, 1}, {2, 2}}, {{1, 2}}, {{2, 1}}}));
  SUBCASE("overlap") {
    try {
      custom_partition(g, {{{1, 1}, {1, 2}}, {{1, 2}, {2, 1}, {2, 2}}});
      FAIL("expected InvalidPartition");
    } catch (const InvalidPartition& e) {
      CHECK(e.cells() == std::vector<CellId>{{1, 2}});
    }
  }
  SUBCASE("gap") {
    try {
      custom_partition(g, {{{1, 1}, {1, 2}}, {{2, 1}}});
      FAIL("expected InvalidPartition");
    } catch (const InvalidPartition& e) {
      CHECK(e.cells() == std::vector<CellId>{{2, 2}});
    }
  }
  SUBCASE("outside") {
    CHECK_THROWS_AS(custom_partition(ArrayLayout::triangle(2),
                                     {{{1, 1}, {1, 2}, {2, 1}, {2, 2}}}),
                    InvalidPartition);
  }
  SUBCASE("empty subset") {
    CHECK_THROWS_AS(custom_partition(g, {{{1, 1}, {1, 2}, {2, 1}, {2, 2}}, {}}),
                    InvalidPartition);
  }
}

TEST_CASE("restriction") {
  const ArrayLayout t = ArrayLayout::triangle(4);
  const Partition r = standard_partition(t, PartitionKind::row_wise);
  std::vector<std::size_t> origin;
  const Partition cut = r.restricted_to(t.without({{4, 1}, {2, 2}}), &origin);
  CHECK(cut.size() == 3);
  CHECK(origin == std::vector<std::size_t>{0, 1, 2});
  CHECK(cut.subsets()[1] == std::vector<CellId>{{2, 1}, {2, 3}});
}

TEST_CASE("equivalence classes") {
  const ArrayLayout t = ArrayLayout::triangle(15);
  const Partition rows = standard_partition(t, PartitionKind::row_wise);
  const Partition diags = standard_partition(t, PartitionKind::diagonal_wise);
  const Partition split = split_diagonal_partition(t, 10);

  SUBCASE("single partition gives its subsets") {
    for (const Partition& p : {rows, diags, split}) {
      const EquivalenceClasses e = equivalence_classes(t, {p});
      auto expected = p.subsets();
      std::sort(expected.begin(), expected.end());
      CHECK(e.classes() == expected);
    }
  }
  SUBCASE("rows and diagonals connect everything") {
    const EquivalenceClasses e = equivalence_classes(t, {rows, diags});
    CHECK(e.size() == 1);
    CHECK(e.classes()[0].size() == 120);
  }
  SUBCASE("rows and split diagonals give two classes") {
    const EquivalenceClasses e = equivalence_classes(t, {rows, split});
    REQUIRE(e.size() == 2);
    for (const CellId& c : e.classes()[0]) CHECK(c.row <= 10);
    for (const CellId& c : e.classes()[1]) CHECK(c.row > 10);
    CHECK(e.classes()[0].size() + e.classes()[1].size() == 120);
    CHECK(e.class_of({10, 6}) == 0);
    CHECK(e.class_of({11, 1}) == 1);
  }
  SUBCASE("no partitions gives singletons") {
    CHECK(equivalence_classes(t, {}).size() == 120);
  }
  SUBCASE("partitions on another layout are rejected") {
    CHECK_THROWS(equivalence_classes(ArrayLayout::triangle(14), {rows}));
  }
}

TEST_CASE("equivalence classes match breadth-first search") {
  std::mt19937_64 rng(2024);
  const ArrayLayout grid = ArrayLayout::full(6, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Partition> parts;
    const int count = static_cast<int>(rng() % 3);
    for (int k = 0; k < count; ++k) {
      // Random partition: each cell gets one of a few labels.
      const int labels = 2 + static_cast<int>(rng() % 12);
      std::vector<std::vector<CellId>> subsets(labels);
      for (const CellId& c : grid.cells()) subsets[rng() % labels].push_back(c);
      std::erase_if(subsets, [](const auto& s) { return s.empty(); });
      parts.push_back(custom_partition(grid, subsets));
    }
    if (rng() % 2) parts.push_back(standard_partition(grid, PartitionKind::cell_wise));
    const EquivalenceClasses e = equivalence_classes(grid, parts);
    auto got = e.classes();
    std::sort(got.begin(), got.end());
    CHECK(got == bfs_classes(grid, parts));
    CHECK(std::is_sorted(e.classes().begin(), e.classes().end(),
                         [](const auto& a, const auto& b) { return a.front() < b.front(); }));
  }
}
