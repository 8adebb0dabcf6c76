#pragma once

#include <optional>
#include <vector>

#include "tcs/shock_model.hpp"

namespace tcs {

inline constexpr double kDefaultBalanceTolerance = 1e-9;

// (a) nu_ij^(n) = C^(n) nu_pi[r](i,j)      (umbrella shocks)
// (b) nu_ij^(n) = K^(n) nu_pi[r](i,j)^(n)  (array-specific shocks)
enum class BalanceCondition { umbrella_multiple, array_specific_multiple };

struct BalanceViolation {
  std::size_t array = 0;
  CellId cell;
  std::size_t family = 0;
  BalanceCondition condition = BalanceCondition::umbrella_multiple;
  double observed = 0.0;  // nu_ij / nu_pi at this cell
  double expected = 0.0;  // the array's multiple
};

// Whether the common shock CoVs of one family are constant over one
// equivalence class, as auto-balance requires.
struct ConstancyFinding {
  std::size_t array = 0;
  std::size_t family = 0;
  ShockRole role = ShockRole::umbrella;
  std::size_t class_index = 0;
  double min_nu = 0.0;
  double max_nu = 0.0;
  bool constant = true;
};

struct ClassConstancy {
  std::vector<ConstancyFinding> findings;

  bool passed() const noexcept;
  std::vector<ConstancyFinding> failures() const;
};

struct ArrayBalance {
  std::size_t umbrella_terms = 0;        // chi
  std::size_t array_specific_terms = 0;  // chi^(n)
  // Consensus ratios; empty when the shock type is absent or the array has
  // no cells.
  std::optional<double> umbrella_multiple;        // C^(n)
  std::optional<double> array_specific_multiple;  // K^(n)
  std::size_t violations = 0;
};

struct BalanceReport {
  bool balanced = false;
  double tolerance = kDefaultBalanceTolerance;
  std::vector<ArrayBalance> arrays;
  std::vector<BalanceViolation> violations;
  ClassConstancy constancy;
};

// For each array the multiples C^(n), K^(n) are taken as the ratio shared by
// the largest group of (cell, family) pairs, within `tol` relative; ties go
// to the group met first in lexicographic cell order. Every pair outside that
// group is a violation, so a single perturbed CoV is reported at its own
// cell(s). Shock types absent from the model impose no condition.
BalanceReport check_auto_balance(const ShockModel& model,
                                 double tol = kDefaultBalanceTolerance);

// 1 + C^(n) chi + K^(n) chi^(n). Throws InvalidState if not balanced.
double kappa(const BalanceReport& report, std::size_t n);

// (kappa mu_ij, kappa sigma_ij^2, nu_ij / kappa). Throws InvalidState if not
// balanced.
CellMoments balanced_cell_moments(const BalanceReport& report, const ShockModel& model,
                                  std::size_t n, const CellId& c);

// Equivalence classes of each array under all the model's partitions,
// restricted to that array's mask.
std::vector<EquivalenceClasses> model_equivalence_classes(const ShockModel& model);

ClassConstancy check_class_constancy(const ShockModel& model,
                                     const std::vector<EquivalenceClasses>& per_array,
                                     double tol = kDefaultBalanceTolerance);

}  // namespace tcs
