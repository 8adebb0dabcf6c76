#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcs/array_cell.hpp"
#include "tcs/error.hpp"

namespace tcs {

// Dense I x J storage addressed by CellId.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, const T& fill = T{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  bool in_bounds(const CellId& c) const noexcept {
    return c.row >= 1 && c.row <= rows_ && c.col >= 1 && c.col <= cols_;
  }

  std::size_t offset(const CellId& c) const noexcept {
    return static_cast<std::size_t>(c.row - 1) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c.col - 1);
  }

  T& operator[](const CellId& c) { return data_[offset(c)]; }
  const T& operator[](const CellId& c) const { return data_[offset(c)]; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// Geometry of one claim array: an I x J grid and the mask of observed cells.
class ArrayLayout {
 public:
  ArrayLayout() = default;

  static ArrayLayout full(int rows, int cols);
  // Cells with i + j - 1 <= n on an n x n grid.
  static ArrayLayout triangle(int n);
  static ArrayLayout from_cells(int rows, int cols, const std::vector<CellId>& cells);

  int rows() const noexcept { return mask_.rows(); }
  int cols() const noexcept { return mask_.cols(); }
  bool in_bounds(const CellId& c) const noexcept { return mask_.in_bounds(c); }
  bool contains(const CellId& c) const noexcept {
    return mask_.in_bounds(c) && mask_[c] != 0;
  }

  // Present cells in lexicographic (row, col) order.
  const std::vector<CellId>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }

  // Copy with cells removed; cells not present are ignored.
  ArrayLayout without(const std::vector<CellId>& removed) const;

  bool subset_of(const ArrayLayout& other) const;

  friend bool operator==(const ArrayLayout& a, const ArrayLayout& b) {
    return a.mask_ == b.mask_;
  }

 private:
  ArrayLayout(Grid<unsigned char> mask);

  Grid<unsigned char> mask_;
  std::vector<CellId> cells_;
};

enum class PartitionKind { array_wide, cell_wise, row_wise, column_wise, diagonal_wise, custom };

std::string_view to_string(PartitionKind kind);
std::optional<PartitionKind> parse_partition_kind(std::string_view name);

// Disjoint non-empty subsets covering every present cell of a layout. Each
// subset is stored sorted; subsets are ordered as produced by the factory
// (row, column or diagonal index for the standard kinds).
class Partition {
 public:
  PartitionKind kind() const noexcept { return kind_; }
  const ArrayLayout& layout() const noexcept { return layout_; }
  const std::vector<std::vector<CellId>>& subsets() const noexcept { return subsets_; }
  std::size_t size() const noexcept { return subsets_.size(); }

  // Index of the subset containing a present cell.
  std::size_t subset_of(const CellId& c) const;

  // Set when the partition came from split_diagonal_partition.
  std::optional<int> split_row() const noexcept { return split_row_; }

  // The same subsets restricted to `mask` with empty subsets dropped.
  // `origin` receives, for every kept subset, its index in this partition.
  Partition restricted_to(const ArrayLayout& mask,
                          std::vector<std::size_t>* origin = nullptr) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.kind_ == b.kind_ && a.split_row_ == b.split_row_ &&
           a.layout_ == b.layout_ && a.subsets_ == b.subsets_;
  }

 private:
  friend Partition standard_partition(const ArrayLayout&, PartitionKind);
  friend Partition custom_partition(const ArrayLayout&, std::vector<std::vector<CellId>>);
  friend Partition split_diagonal_partition(const ArrayLayout&, int);

  Partition(const ArrayLayout& layout, PartitionKind kind,
            std::vector<std::vector<CellId>> subsets);

  PartitionKind kind_ = PartitionKind::custom;
  ArrayLayout layout_;
  std::vector<std::vector<CellId>> subsets_;
  Grid<int> index_;
  std::optional<int> split_row_;
};

// One of the standard dependence shapes restricted to present cells.
// Throws std::invalid_argument for PartitionKind::custom.
Partition standard_partition(const ArrayLayout& layout, PartitionKind kind);

// Throws InvalidPartition if subsets overlap, leave a present cell uncovered,
// reference cells outside the layout, or are empty.
Partition custom_partition(const ArrayLayout& layout,
                           std::vector<std::vector<CellId>> subsets);

// Calendar diagonals split at accident period `split_row`: the subsets
// D_t ∩ {i <= split_row} ordered by t, followed by D_t ∩ {i > split_row}.
Partition split_diagonal_partition(const ArrayLayout& layout, int split_row);

class EquivalenceClasses {
 public:
  EquivalenceClasses() = default;
  EquivalenceClasses(const ArrayLayout& layout, std::vector<std::vector<CellId>> classes);

  const std::vector<std::vector<CellId>>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return classes_.size(); }
  std::size_t class_of(const CellId& c) const;

  friend bool operator==(const EquivalenceClasses& a, const EquivalenceClasses& b) {
    return a.classes_ == b.classes_;
  }

 private:
  std::vector<std::vector<CellId>> classes_;
  Grid<int> index_;
};

// Maximal sets of cells connected through chains of overlapping subsets of
// any of the partitions. Classes are sorted by their smallest cell.
EquivalenceClasses equivalence_classes(const ArrayLayout& layout,
                                       const std::vector<Partition>& partitions);

}  // namespace tcs
