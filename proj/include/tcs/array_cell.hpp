#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>

namespace tcs {

// Cell of a claim array. Rows are accident periods, columns development
// periods, both 1-based.
struct CellId {
  int row = 1;
  int col = 1;

  // Calendar period t = i + j - 1.
  constexpr int diagonal() const noexcept { return row + col - 1; }

  friend constexpr auto operator<=>(const CellId&, const CellId&) = default;
};

inline std::string to_string(const CellId& c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const CellId& c) {
  return os << to_string(c);
}

}  // namespace tcs
