#include "tcs/datasets.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "tcs/config.hpp"

namespace tcs::datasets {
namespace {

constexpr int kSize = 15;
constexpr double kPower = 1.8;
constexpr double kRowGrowth = 1.02;

using Vec = std::vector<double>;

double pow4(double x) { return x * x * x * x; }

// Entry j (1-based) of an input vector; vectors one entry short
// repeat their last value.
double at(const Vec& v, int index) {
  const auto k = static_cast<std::size_t>(index - 1);
  return k < v.size() ? v[k] : v.back();
}

double grown(double first_row, int row) { return first_row * std::pow(kRowGrowth, row - 1); }

// Idiosyncratic means, shared by all three data sets.
const Vec kIdioMean1 = {500, 1000, 1500, 2000, 2000, 1000, 700, 500, 400, 200, 100, 50, 25, 15, 10};
const Vec kIdioMean2 = {3000, 4000, 1000, 500, 400, 300, 200, 100, 100, 100, 100, 50, 50, 50, 50};

struct Spec {
  std::array<Multiples, 2> multiples;
};

const std::array<Spec, 3> kSpecs = {{
    {{{{pow4(0.6), pow4(0.33)}, {pow4(0.3), pow4(0.45)}}}},
    {{{{pow4(0.44), pow4(0.29)}, {pow4(0.3), pow4(0.45)}}}},
    {{{{pow4(0.45), pow4(0.31)}, {pow4(0.38), pow4(0.5)}}}},
}};

void check(int which) {
  if (which < 1 || which > 3) throw std::invalid_argument("data set must be 1, 2 or 3");
}

// nu^(n) = (C / K) nu_pi for the array-specific shock, nu_ij = K nu^(n).
double array_nu(const Multiples& m, double umbrella_nu) {
  return m.umbrella / m.array_specific * umbrella_nu;
}

Grid<MeanCov> idiosyncratic(const ArrayLayout& grid, std::size_t n, const Multiples& m,
                            const std::function<double(const CellId&)>& array_specific_nu) {
  Grid<MeanCov> table(grid.rows(), grid.cols(), MeanCov{0.0, 0.0});
  for (const CellId& c : grid.cells()) {
    const double mean = n == 0 ? grown(at(kIdioMean1, c.col), c.row) : at(kIdioMean2, c.col);
    table[c] = {mean, m.array_specific * array_specific_nu(c)};
  }
  return table;
}

ShockModel dataset1(const ArrayLayout& grid) {
  const Spec& spec = kSpecs[0];
  const Vec umbrella_mean = {100, 500, 1000, 1000, 1000, 1000, 500, 250, 100, 50, 50, 50, 50, 50, 50};
  const Vec umbrella_cov = {0.1, 0.06, 0.05, 0.05, 0.06, 0.06, 0.1, 0.15,
                            0.2, 0.3,  0.45, 0.6,  0.75, 0.9,  0.9};
  const Vec array_mean1 = {25, 50, 100, 100, 100, 25, 20, 20, 10, 10, 10, 10, 10, 10, 10};
  const Vec array_mean2 = {1000, 1000, 1000, 500, 200, 20, 10, 5, 5, 5, 5, 5, 5, 5};

  Partition part = standard_partition(grid, PartitionKind::cell_wise);
  auto umbrella_nu = [&](const CellId& c) {
    const double cov = at(umbrella_cov, c.col) / (0.6 * 0.6);
    return cov * cov;
  };

  std::vector<MeanCov> umbrella;
  std::vector<std::vector<MeanCov>> array_specific(2);
  for (const auto& subset : part.subsets()) {
    const CellId c = subset.front();
    umbrella.push_back({grown(at(umbrella_mean, c.col), c.row), umbrella_nu(c)});
    array_specific[0].push_back(
        {grown(at(array_mean1, c.col), c.row), array_nu(spec.multiples[0], umbrella_nu(c))});
    array_specific[1].push_back({at(array_mean2, c.col), array_nu(spec.multiples[1], umbrella_nu(c))});
  }

  std::vector<ClaimArray> arrays;
  for (std::size_t n = 0; n < 2; ++n) {
    const Multiples& m = spec.multiples[n];
    arrays.push_back({"triangle-" + std::to_string(n + 1), grid,
                      idiosyncratic(grid, n, m, [&](const CellId& c) {
                        return array_nu(m, umbrella_nu(c));
                      })});
  }
  std::vector<ShockFamily> families;
  families.push_back({"cells", std::move(part), std::move(umbrella), std::move(array_specific)});
  return ShockModel("dataset-1", kPower, grid, std::move(arrays), std::move(families));
}

ShockModel dataset2(const ArrayLayout& grid) {
  const Spec& spec = kSpecs[1];
  const Vec umbrella_cov = {0.1, 0.09, 0.08, 0.09, 0.1, 0.1, 0.11, 0.09, 0.12, 0.1, 0.08, 0.09, 0.08, 0.08};

  Partition part = standard_partition(grid, PartitionKind::row_wise);
  auto umbrella_nu = [&](int row) {
    const double cov = at(umbrella_cov, row) / (0.44 * 0.44);
    return cov * cov;
  };

  std::vector<MeanCov> umbrella;
  std::vector<std::vector<MeanCov>> array_specific(2);
  for (const auto& subset : part.subsets()) {
    const int i = subset.front().row;
    umbrella.push_back({grown(100.0, i), umbrella_nu(i)});
    array_specific[0].push_back({grown(25.0, i), array_nu(spec.multiples[0], umbrella_nu(i))});
    array_specific[1].push_back({1000.0, array_nu(spec.multiples[1], umbrella_nu(i))});
  }

  std::vector<ClaimArray> arrays;
  for (std::size_t n = 0; n < 2; ++n) {
    const Multiples& m = spec.multiples[n];
    arrays.push_back({"triangle-" + std::to_string(n + 1), grid,
                      idiosyncratic(grid, n, m, [&](const CellId& c) {
                        return array_nu(m, umbrella_nu(c.row));
                      })});
  }
  std::vector<ShockFamily> families;
  families.push_back({"rows", std::move(part), std::move(umbrella), std::move(array_specific)});
  return ShockModel("dataset-2", kPower, grid, std::move(arrays), std::move(families));
}

ShockModel dataset3(const ArrayLayout& grid) {
  const Spec& spec = kSpecs[2];
  constexpr int kSplit = 10;
  const Vec low_mean = {100, 102, 104, 106, 108, 110, 113, 115, 117, 120, 117, 119, 121, 124, 126};
  const Vec high_mean = {146, 149, 152, 153, 158};  // t = 11..15

  // CoVs are constant on each equivalence class {i <= 10}, {i > 10}.
  auto umbrella_nu = [&](int row) {
    const double cov = (row <= kSplit ? 0.1 : 0.08) / (0.45 * 0.45);
    return cov * cov;
  };

  Partition diagonals = split_diagonal_partition(grid, kSplit);
  std::vector<MeanCov> umbrella;
  for (const auto& subset : diagonals.subsets()) {
    const CellId c = subset.front();
    const double mean = c.row <= kSplit ? at(low_mean, c.diagonal()) : at(high_mean, c.diagonal() - kSplit);
    umbrella.push_back({mean, umbrella_nu(c.row)});
  }

  Partition rows = standard_partition(grid, PartitionKind::row_wise);
  std::vector<std::vector<MeanCov>> array_specific(2);
  for (const auto& subset : rows.subsets()) {
    const int i = subset.front().row;
    array_specific[0].push_back({grown(25.0, i), array_nu(spec.multiples[0], umbrella_nu(i))});
    array_specific[1].push_back({1000.0, array_nu(spec.multiples[1], umbrella_nu(i))});
  }

  std::vector<ClaimArray> arrays;
  for (std::size_t n = 0; n < 2; ++n) {
    const Multiples& m = spec.multiples[n];
    arrays.push_back({"triangle-" + std::to_string(n + 1), grid,
                      idiosyncratic(grid, n, m, [&](const CellId& c) {
                        return array_nu(m, umbrella_nu(c.row));
                      })});
  }
  std::vector<ShockFamily> families;
  families.push_back({"split-diagonals", std::move(diagonals), std::move(umbrella), std::nullopt});
  families.push_back({"rows", std::move(rows), std::nullopt, std::move(array_specific)});
  return ShockModel("dataset-3", kPower, grid, std::move(arrays), std::move(families));
}

}  // namespace

Multiples multiples(int which, std::size_t array) {
  check(which);
  return kSpecs[static_cast<std::size_t>(which - 1)].multiples.at(array);
}

ShockModel build(int which) {
  check(which);
  const ArrayLayout grid = ArrayLayout::triangle(kSize);
  switch (which) {
    case 1: return dataset1(grid);
    case 2: return dataset2(grid);
    default: return dataset3(grid);
  }
}

nlohmann::json generate(int which) {
  nlohmann::json doc = config::emit_model(build(which));
  nlohmann::json notes = nlohmann::json::array();
  notes.push_back("Two 15x15 claim triangles, power p = 1.8.");
  notes.push_back("Array-specific CoV: sqrt(nu_pi^(n)) = sqrt(C/K) sqrt(nu_pi).");
  notes.push_back(
      "Idiosyncratic CoV: sqrt(nu_ij) = sqrt(K) sqrt(nu_pi^(n)), so nu_ij = K nu_pi^(n) and "
      "nu_ij = C nu_pi hold in every cell.");
  switch (which) {
    case 1:
      notes.push_back(
          "The triangle-2 array-specific mean vector has 14 entries for 15 columns; its last "
          "entry (5) is repeated for column 15.");
      break;
    case 2:
      notes.push_back(
          "The umbrella CoV vector has 14 entries for 15 row subsets; its last entry "
          "(0.08/0.44^2) is repeated for row 15.");
      break;
    case 3:
      notes.push_back(
          "Array-specific means reuse the row-wise values of data set 2 (25 * 1.02^(i-1) in "
          "triangle 1, 1000 in triangle 2).");
      notes.push_back("Equivalence classes: {i <= 10} and {i > 10} in each triangle.");
      break;
  }
  doc["notes"] = notes;
  return doc;
}

}  // namespace tcs::datasets
