#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcs/array_partition.hpp"
#include "tcs/tweedie.hpp"

namespace tcs {

using tweedie::MeanCov;

enum class ShockRole { umbrella, array_specific, idiosyncratic };

std::string_view to_string(ShockRole role);

// One partition of the claim arrays together with the shocks attached to its
// subsets. Parameters are indexed by subset of `partition`, which is defined
// on the model's grid layout; arrays with a smaller mask simply skip subsets
// they do not intersect.
struct ShockFamily {
  std::string name;
  Partition partition;
  // Shared across arrays: one entry per subset.
  std::optional<std::vector<MeanCov>> umbrella;
  // [array][subset].
  std::optional<std::vector<std::vector<MeanCov>>> array_specific;

  bool has_umbrella() const noexcept { return umbrella.has_value(); }
  bool has_array_specific() const noexcept { return array_specific.has_value(); }

  friend bool operator==(const ShockFamily&, const ShockFamily&) = default;
};

struct ClaimArray {
  std::string name;
  ArrayLayout layout;
  // Idiosyncratic (mean, nu) on the grid; only present cells are meaningful.
  Grid<MeanCov> idiosyncratic;

  friend bool operator==(const ClaimArray&, const ClaimArray&) = default;
};

// Multivariate Tweedie common shock model
//
//   X_ij^(n) = sum_r a_ij,r^(n) W_r(i,j) + sum_r b_ij,r^(n) W_r(i,j)^(n) + Z_ij^(n)
//
// The mixture coefficients are never stored; they are derived from the
// component (mean, nu) so that every X_ij^(n) is Tweedie by construction.
class ShockModel {
 public:
  // Throws ConfigError describing the first structural problem found.
  ShockModel(std::string name, double p, ArrayLayout grid,
             std::vector<ClaimArray> arrays, std::vector<ShockFamily> families);

  const std::string& name() const noexcept { return name_; }
  double p() const noexcept { return p_; }
  const ArrayLayout& grid() const noexcept { return grid_; }

  std::size_t array_count() const noexcept { return arrays_.size(); }
  const ClaimArray& array(std::size_t n) const { return arrays_.at(n); }
  const std::vector<ClaimArray>& arrays() const noexcept { return arrays_; }

  std::size_t family_count() const noexcept { return families_.size(); }
  const ShockFamily& family(std::size_t r) const { return families_.at(r); }
  const std::vector<ShockFamily>& families() const noexcept { return families_; }

  // Number of umbrella (chi) and array-specific (chi^(n)) terms per cell.
  std::size_t umbrella_terms() const noexcept;
  std::size_t array_specific_terms() const noexcept;

  bool contains(std::size_t n, const CellId& c) const {
    return array(n).layout.contains(c);
  }

  // Throws std::out_of_range when the cell is absent from array n.
  const MeanCov& idiosyncratic(std::size_t n, const CellId& c) const;
  // Throws ComponentAbsent when the family carries no such shock.
  const MeanCov& umbrella(std::size_t r, const CellId& c) const;
  const MeanCov& array_specific(std::size_t n, std::size_t r, const CellId& c) const;

  // Copy with array n restricted to `layout`; parameters of removed cells are
  // cleared.
  ShockModel with_mask(std::size_t n, const ArrayLayout& layout) const;

  friend bool operator==(const ShockModel&, const ShockModel&) = default;

 private:
  void require_cell(std::size_t n, const CellId& c) const;

  std::string name_;
  double p_;
  ArrayLayout grid_;
  std::vector<ClaimArray> arrays_;
  std::vector<ShockFamily> families_;
};

struct MixtureCoefficients {
  std::optional<double> umbrella;
  std::optional<double> array_specific;
};

// (mu_ij / mu_pi) (nu_ij / nu_pi) for each shock present in family r.
MixtureCoefficients mixture_coefficients(const ShockModel& model, std::size_t n,
                                         const CellId& c, std::size_t r);

// Single coefficient; throws ComponentAbsent if that shock is not present.
double mixture_coefficient(const ShockModel& model, std::size_t n, const CellId& c,
                           std::size_t r, ShockRole role);

// Tweedie law of X_ij^(n). For p = 1 every component must have nu = 1 / mean,
// otherwise ConstraintViolation is thrown.
tweedie::Params observation_distribution(const ShockModel& model, std::size_t n,
                                         const CellId& c);

// 1 + sum_r nu_ij / nu_pi[r] + sum_r nu_ij / nu_pi[r]^(n).
double moment_multiple(const ShockModel& model, std::size_t n, const CellId& c);

struct CellMoments {
  double mean = 0.0;
  double variance = 0.0;
  double sq_cov = 0.0;
};

// Mean, variance and squared CoV of X_ij^(n) from the component moments.
CellMoments cell_moments(const ShockModel& model, std::size_t n, const CellId& c);

struct ContributionKey {
  ShockRole role = ShockRole::idiosyncratic;
  std::size_t family = 0;  // unused for the idiosyncratic component

  friend auto operator<=>(const ContributionKey&, const ContributionKey&) = default;
};

std::string label(const ShockModel& model, const ContributionKey& key);

// Components present in every cell, in assembly order: umbrella shocks by
// family, array-specific shocks by family, then the idiosyncratic component.
std::vector<ContributionKey> contribution_keys(const ShockModel& model);

// Expected share of each component in E[X_ij^(n)], aligned with
// contribution_keys(model). Shares sum to one.
std::vector<double> expected_contributions(const ShockModel& model, std::size_t n,
                                           const CellId& c);

}  // namespace tcs
