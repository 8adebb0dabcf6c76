#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tcs/balance.hpp"
#include "tcs/sim_engine.hpp"

// Text, CSV and JSON renderings of model analyses.
namespace tcs::report {

// Range over an array's cells of one component's expected share.
struct ShareRange {
  std::size_t array = 0;
  ContributionKey key;
  double min = 0.0;
  double max = 0.0;

  bool constant(double tol = 1e-9) const noexcept;
};

std::vector<ShareRange> expected_share_ranges(const ShockModel& model);

// Percentage with one decimal, e.g. "11.4%".
std::string percent(double share);

std::string balance_text(const BalanceReport& report, const ShockModel& model);
nlohmann::json balance_json(const BalanceReport& report, const ShockModel& model);

// Columns: array,row,col,mean,variance,sq_cov.
void write_moments_csv(std::ostream& out, const ShockModel& model, std::size_t n,
                       int significant_digits = 6);

std::string contributions_text(const ShockModel& model);

// Accident periods down, development periods across, fractions to six
// decimals, blank where the cell is absent or the fraction undefined.
void write_contribution_csv(std::ostream& out, const ContributionTable& table,
                            const ShockModel& model, std::size_t replication);

// Per-cell empirical versus analytic moments and contribution shares.
void write_summary_csv(std::ostream& out, const SimulationResult& result,
                       const ShockModel& model);

std::string classes_text(const ShockModel& model);

}  // namespace tcs::report
