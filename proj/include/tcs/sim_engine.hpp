#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tcs/running_moments.hpp"
#include "tcs/shock_model.hpp"

namespace tcs {

struct SimulationOptions {
  std::uint64_t seed = 0;
  std::uint64_t replications = 1000;
  unsigned workers = 1;
  // Keep every replication's component draws (memory grows with replications).
  bool retain = false;
};

// Component draws of one replication. Shock entries are NaN for subsets that
// intersect no observed cell and therefore are never drawn.
struct ReplicationSample {
  std::vector<std::vector<double>> umbrella;                     // [family][subset]
  std::vector<std::vector<std::vector<double>>> array_specific;  // [array][family][subset]
  std::vector<Grid<double>> idiosyncratic;                       // [array]
  std::vector<Grid<double>> total;                               // [array]
};

struct CellAccumulator {
  CellId cell;
  RunningMoments total;
  std::vector<double> fraction_sum;  // aligned with SimulationResult::keys
  std::uint64_t defined = 0;         // replications with X != 0
  std::uint64_t undefined = 0;

  friend bool operator==(const CellAccumulator&, const CellAccumulator&) = default;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::uint64_t replications = 0;
  std::vector<ContributionKey> keys;
  std::vector<std::vector<CellAccumulator>> cells;  // [array][k], mask order
  std::vector<ReplicationSample> retained;          // empty unless retained
};

// Bit-for-bit equality of every stored number (NaN placeholders included).
bool identical(const SimulationResult& a, const SimulationResult& b);

// Draws every shock once per (replication, subset) and every idiosyncratic
// component once per (replication, cell), from streams keyed by
// (seed, role, array, family, subset or cell, replication), then assembles
//
//   X = sum_r a_r W_r + sum_r b_r W_r^(n) + Z
//
// left to right in that order. Results do not depend on `workers`.
// Throws UnsupportedPower / ConstraintViolation before drawing anything.
SimulationResult simulate(const ShockModel& model, const SimulationOptions& options);

// Per-cell share of each component in the realized total, for one retained
// replication. Cells absent from the array, or with X = 0, hold nullopt.
struct ContributionTable {
  std::size_t array = 0;
  ContributionKey key;
  Grid<std::optional<double>> values;
};

std::vector<ContributionTable> realized_contributions(const SimulationResult& result,
                                                      const ShockModel& model,
                                                      std::size_t replication);

struct CellEmpirical {
  CellId cell;
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  std::vector<double> mean_fractions;  // over replications with X != 0
  std::uint64_t excluded = 0;          // replications with X = 0
};

// Throws InvalidState with fewer than two replications.
std::vector<std::vector<CellEmpirical>> empirical_summary(const SimulationResult& result,
                                                          const ShockModel& model);

}  // namespace tcs
