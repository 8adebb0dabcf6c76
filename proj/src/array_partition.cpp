#include "tcs/array_partition.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "tcs/union_find.hpp"

namespace tcs {
namespace {

std::string list_cells(const std::vector<CellId>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k == 8) {
      out += " ... (" + std::to_string(cells.size()) + " cells)";
      break;
    }
    if (k) out += ' ';
    out += to_string(cells[k]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ArrayLayout

ArrayLayout::ArrayLayout(Grid<unsigned char> mask) : mask_(std::move(mask)) {
  for (int i = 1; i <= mask_.rows(); ++i)
    for (int j = 1; j <= mask_.cols(); ++j)
      if (mask_[{i, j}]) cells_.push_back({i, j});
}

ArrayLayout ArrayLayout::full(int rows, int cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("array dimensions must be positive");
  return ArrayLayout(Grid<unsigned char>(rows, cols, 1));
}

ArrayLayout ArrayLayout::triangle(int n) {
  if (n < 1) throw std::invalid_argument("triangle size must be positive");
  Grid<unsigned char> mask(n, n, 0);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; i + j - 1 <= n; ++j) mask[{i, j}] = 1;
  return ArrayLayout(std::move(mask));
}

ArrayLayout ArrayLayout::from_cells(int rows, int cols,
                                    const std::vector<CellId>& cells) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("array dimensions must be positive");
  Grid<unsigned char> mask(rows, cols, 0);
  std::vector<CellId> outside;
  for (const CellId& c : cells) {
    if (!mask.in_bounds(c))
      outside.push_back(c);
    else
      mask[c] = 1;
  }
  if (!outside.empty())
    throw InvalidPartition("cells outside the " + std::to_string(rows) + "x" +
                               std::to_string(cols) + " grid: " + list_cells(outside),
                           outside);
  return ArrayLayout(std::move(mask));
}

ArrayLayout ArrayLayout::without(const std::vector<CellId>& removed) const {
  Grid<unsigned char> mask = mask_;
  for (const CellId& c : removed)
    if (mask.in_bounds(c)) mask[c] = 0;
  return ArrayLayout(std::move(mask));
}

bool ArrayLayout::subset_of(const ArrayLayout& other) const {
  if (rows() != other.rows() || cols() != other.cols()) return false;
  return std::all_of(cells_.begin(), cells_.end(),
                     [&](const CellId& c) { return other.contains(c); });
}

// ---------------------------------------------------------------------------
// Partition

std::string_view to_string(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::array_wide: return "array-wide";
    case PartitionKind::cell_wise: return "cell-wise";
    case PartitionKind::row_wise: return "row-wise";
    case PartitionKind::column_wise: return "column-wise";
    case PartitionKind::diagonal_wise: return "diagonal-wise";
    case PartitionKind::custom: return "custom";
  }
  return "custom";
}

std::optional<PartitionKind> parse_partition_kind(std::string_view name) {
  for (PartitionKind k : {PartitionKind::array_wide, PartitionKind::cell_wise,
                          PartitionKind::row_wise, PartitionKind::column_wise,
                          PartitionKind::diagonal_wise, PartitionKind::custom})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Partition::Partition(const ArrayLayout& layout, PartitionKind kind,
                     std::vector<std::vector<CellId>> subsets)
    : kind_(kind), layout_(layout), index_(layout.rows(), layout.cols(), -1) {
  std::vector<CellId> outside;
  std::vector<CellId> overlap;
  std::vector<CellId> uncovered;
  bool has_empty = false;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    auto& subset = subsets[s];
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.empty()) has_empty = true;
    for (const CellId& c : subset) {
      if (!layout.contains(c)) {
        outside.push_back(c);
        continue;
      }
      int& slot = index_[c];
      if (slot >= 0)
        overlap.push_back(c);
      else
        slot = static_cast<int>(s);
    }
  }
  for (const CellId& c : layout.cells())
    if (index_[c] < 0) uncovered.push_back(c);

  if (!outside.empty())
    throw InvalidPartition("subset cells not present in the layout: " + list_cells(outside),
                           outside);
  if (!overlap.empty())
    throw InvalidPartition("cells assigned to more than one subset: " + list_cells(overlap),
                           overlap);
  if (!uncovered.empty())
    throw InvalidPartition("cells not covered by any subset: " + list_cells(uncovered),
                           uncovered);
  if (has_empty) throw InvalidPartition("partition contains an empty subset", {});
  subsets_ = std::move(subsets);
}

std::size_t Partition::subset_of(const CellId& c) const {
  if (!layout_.contains(c))
    throw std::out_of_range("cell " + to_string(c) + " is not in the partitioned layout");
  return static_cast<std::size_t>(index_[c]);
}

Partition Partition::restricted_to(const ArrayLayout& mask,
                                   std::vector<std::size_t>* origin) const {
  if (!mask.subset_of(layout_))
    throw std::invalid_argument("restriction mask is not a subset of the partition layout");
  std::vector<std::vector<CellId>> kept;
  if (origin) origin->clear();
  for (std::size_t s = 0; s < subsets_.size(); ++s) {
    std::vector<CellId> part;
    for (const CellId& c : subsets_[s])
      if (mask.contains(c)) part.push_back(c);
    if (part.empty()) continue;
    kept.push_back(std::move(part));
    if (origin) origin->push_back(s);
  }
  Partition out(mask, kind_, std::move(kept));
  out.split_row_ = split_row_;
  return out;
}

Partition standard_partition(const ArrayLayout& layout, PartitionKind kind) {
  std::map<int, std::vector<CellId>> groups;
  for (const CellId& c : layout.cells()) {
    switch (kind) {
      case PartitionKind::array_wide: groups[0].push_back(c); break;
      case PartitionKind::cell_wise:
        groups[static_cast<int>(groups.size())].push_back(c);
        break;
      case PartitionKind::row_wise: groups[c.row].push_back(c); break;
      case PartitionKind::column_wise: groups[c.col].push_back(c); break;
      case PartitionKind::diagonal_wise: groups[c.diagonal()].push_back(c); break;
      case PartitionKind::custom:
        throw std::invalid_argument("custom partitions need explicit subsets");
    }
  }
  std::vector<std::vector<CellId>> subsets;
  subsets.reserve(groups.size());
  for (auto& [key, cells] : groups) subsets.push_back(std::move(cells));
  return Partition(layout, kind, std::move(subsets));
}

Partition custom_partition(const ArrayLayout& layout,
                           std::vector<std::vector<CellId>> subsets) {
  return Partition(layout, PartitionKind::custom, std::move(subsets));
}

Partition split_diagonal_partition(const ArrayLayout& layout, int split_row) {
  std::map<int, std::vector<CellId>> low;
  std::map<int, std::vector<CellId>> high;
  for (const CellId& c : layout.cells())
    (c.row <= split_row ? low : high)[c.diagonal()].push_back(c);
  std::vector<std::vector<CellId>> subsets;
  for (auto& [t, cells] : low) subsets.push_back(std::move(cells));
  for (auto& [t, cells] : high) subsets.push_back(std::move(cells));
  Partition out(layout, PartitionKind::custom, std::move(subsets));
  out.split_row_ = split_row;
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence classes

EquivalenceClasses::EquivalenceClasses(const ArrayLayout& layout,
                                       std::vector<std::vector<CellId>> classes)
    : classes_(std::move(classes)), index_(layout.rows(), layout.cols(), -1) {
  for (std::size_t h = 0; h < classes_.size(); ++h)
    for (const CellId& c : classes_[h]) index_[c] = static_cast<int>(h);
}

std::size_t EquivalenceClasses::class_of(const CellId& c) const {
  if (!index_.in_bounds(c) || index_[c] < 0)
    throw std::out_of_range("cell " + to_string(c) + " belongs to no class");
  return static_cast<std::size_t>(index_[c]);
}

EquivalenceClasses equivalence_classes(const ArrayLayout& layout,
                                       const std::vector<Partition>& partitions) {
  const auto& cells = layout.cells();
  Grid<int> position(layout.rows(), layout.cols(), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) position[cells[k]] = static_cast<int>(k);

  UnionFind uf(cells.size());
  for (const Partition& part : partitions) {
    if (!(part.layout() == layout))
      throw std::invalid_argument("partition is defined on a different layout");
    for (const auto& subset : part.subsets())
      for (std::size_t k = 1; k < subset.size(); ++k)
        uf.unite(static_cast<std::size_t>(position[subset.front()]),
                 static_cast<std::size_t>(position[subset[k]]));
  }

  // Cells are visited in lexicographic order, so classes come out sorted by
  // their smallest member and each class is itself sorted.
  std::vector<std::vector<CellId>> classes;
  std::vector<int> slot(cells.size(), -1);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t root = uf.find(k);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(slot[root])].push_back(cells[k]);
  }
  return EquivalenceClasses(layout, std::move(classes));
}

}  // namespace tcs
