#include "tcs/shock_model.hpp"

#include <cmath>
#include <stdexcept>

namespace tcs {
namespace {

bool positive(const MeanCov& mc) {
  return mc.mean > 0.0 && mc.nu > 0.0 && std::isfinite(mc.mean) && std::isfinite(mc.nu);
}

std::string describe(const MeanCov& mc) {
  return "mean " + std::to_string(mc.mean) + ", nu " + std::to_string(mc.nu);
}

void check_poisson(const MeanCov& mc, const std::string& what) {
  if (std::abs(mc.mean * mc.nu - 1.0) > tweedie::kDefaultPoissonTolerance)
    throw ConstraintViolation("p = 1 requires a common canonical parameter; " + what +
                              " has nu != 1/mean (" + describe(mc) + ")");
}

}  // namespace

std::string_view to_string(ShockRole role) {
  switch (role) {
    case ShockRole::umbrella: return "umbrella";
    case ShockRole::array_specific: return "array-specific";
    case ShockRole::idiosyncratic: return "idiosyncratic";
  }
  return "idiosyncratic";
}

ShockModel::ShockModel(std::string name, double p, ArrayLayout grid,
                       std::vector<ClaimArray> arrays, std::vector<ShockFamily> families)
    : name_(std::move(name)), p_(p), grid_(std::move(grid)),
      arrays_(std::move(arrays)), families_(std::move(families)) {
  if (!tweedie::admissible_power(p_))
    throw ConfigError("/power", "power parameter outside (-inf, 0] U [1, inf)");
  if (arrays_.empty()) throw ConfigError("/arrays", "at least one array is required");

  for (std::size_t n = 0; n < arrays_.size(); ++n) {
    const std::string path = "/arrays/" + std::to_string(n);
    const ClaimArray& a = arrays_[n];
    if (!a.layout.subset_of(grid_))
      throw ConfigError(path, "array mask is not contained in the grid");
    if (a.idiosyncratic.rows() != grid_.rows() || a.idiosyncratic.cols() != grid_.cols())
      throw ConfigError(path + "/idiosyncratic", "table does not match the grid shape");
    for (const CellId& c : a.layout.cells())
      if (!positive(a.idiosyncratic[c]))
        throw ConfigError(path + "/idiosyncratic",
                          "cell " + to_string(c) + " needs positive mean and nu (" +
                              describe(a.idiosyncratic[c]) + ")");
  }

  for (std::size_t r = 0; r < families_.size(); ++r) {
    const std::string path = "/partitions/" + std::to_string(r);
    const ShockFamily& f = families_[r];
    if (!(f.partition.layout() == grid_))
      throw ConfigError(path, "partition is not defined on the grid layout");
    if (!f.has_umbrella() && !f.has_array_specific())
      throw ConfigError(path, "needs an umbrella or an array-specific shock (or both)");
    const std::size_t subsets = f.partition.size();
    if (f.umbrella) {
      if (f.umbrella->size() != subsets)
        throw ConfigError(path + "/umbrella", "expected " + std::to_string(subsets) +
                                                  " subset entries, got " +
                                                  std::to_string(f.umbrella->size()));
      for (std::size_t s = 0; s < subsets; ++s)
        if (!positive((*f.umbrella)[s]))
          throw ConfigError(path + "/umbrella",
                            "subset " + std::to_string(s + 1) +
                                " needs positive mean and nu (" +
                                describe((*f.umbrella)[s]) + ")");
    }
    if (f.array_specific) {
      if (f.array_specific->size() != arrays_.size())
        throw ConfigError(path + "/array_specific",
                          "expected one table per array (" +
                              std::to_string(arrays_.size()) + "), got " +
                              std::to_string(f.array_specific->size()));
      for (std::size_t n = 0; n < arrays_.size(); ++n) {
        const auto& table = (*f.array_specific)[n];
        const std::string tpath = path + "/array_specific/" + std::to_string(n);
        if (table.size() != subsets)
          throw ConfigError(tpath, "expected " + std::to_string(subsets) +
                                       " subset entries, got " +
                                       std::to_string(table.size()));
        for (std::size_t s = 0; s < subsets; ++s)
          if (!positive(table[s]))
            throw ConfigError(tpath, "subset " + std::to_string(s + 1) +
                                         " needs positive mean and nu (" +
                                         describe(table[s]) + ")");
      }
    }
  }
}

std::size_t ShockModel::umbrella_terms() const noexcept {
  std::size_t k = 0;
  for (const auto& f : families_) k += f.has_umbrella() ? 1 : 0;
  return k;
}

std::size_t ShockModel::array_specific_terms() const noexcept {
  std::size_t k = 0;
  for (const auto& f : families_) k += f.has_array_specific() ? 1 : 0;
  return k;
}

void ShockModel::require_cell(std::size_t n, const CellId& c) const {
  if (!array(n).layout.contains(c))
    throw std::out_of_range("cell " + to_string(c) + " is not present in array " +
                            std::to_string(n + 1));
}

const MeanCov& ShockModel::idiosyncratic(std::size_t n, const CellId& c) const {
  require_cell(n, c);
  return arrays_[n].idiosyncratic[c];
}

const MeanCov& ShockModel::umbrella(std::size_t r, const CellId& c) const {
  const ShockFamily& f = family(r);
  if (!f.umbrella)
    throw ComponentAbsent("family '" + f.name + "' has no umbrella shock");
  return (*f.umbrella)[f.partition.subset_of(c)];
}

const MeanCov& ShockModel::array_specific(std::size_t n, std::size_t r,
                                          const CellId& c) const {
  const ShockFamily& f = family(r);
  if (!f.array_specific)
    throw ComponentAbsent("family '" + f.name + "' has no array-specific shock");
  return (*f.array_specific).at(n)[f.partition.subset_of(c)];
}

ShockModel ShockModel::with_mask(std::size_t n, const ArrayLayout& layout) const {
  std::vector<ClaimArray> arrays = arrays_;
  ClaimArray& a = arrays.at(n);
  a.layout = layout;
  for (const CellId& c : grid_.cells())
    if (!layout.contains(c)) a.idiosyncratic[c] = MeanCov{0.0, 0.0};
  return ShockModel(name_, p_, grid_, std::move(arrays), families_);
}

MixtureCoefficients mixture_coefficients(const ShockModel& model, std::size_t n,
                                         const CellId& c, std::size_t r) {
  const MeanCov& z = model.idiosyncratic(n, c);
  const ShockFamily& f = model.family(r);
  MixtureCoefficients out;
  if (f.has_umbrella()) {
    const MeanCov& w = model.umbrella(r, c);
    out.umbrella = (z.mean / w.mean) * (z.nu / w.nu);
  }
  if (f.has_array_specific()) {
    const MeanCov& w = model.array_specific(n, r, c);
    out.array_specific = (z.mean / w.mean) * (z.nu / w.nu);
  }
  return out;
}

double mixture_coefficient(const ShockModel& model, std::size_t n, const CellId& c,
                           std::size_t r, ShockRole role) {
  const MixtureCoefficients m = mixture_coefficients(model, n, c, r);
  const std::optional<double>& v =
      role == ShockRole::umbrella ? m.umbrella : m.array_specific;
  if (role == ShockRole::idiosyncratic || !v)
    throw ComponentAbsent("family '" + model.family(r).name + "' has no " +
                          std::string(to_string(role)) + " shock");
  return *v;
}

tweedie::Params observation_distribution(const ShockModel& model, std::size_t n,
                                         const CellId& c) {
  const MeanCov& z = model.idiosyncratic(n, c);
  const double p = model.p();

  if (p == 1.0) {
    check_poisson(z, "idiosyncratic component at " + to_string(c));
    double lambda = z.mean;
    for (std::size_t r = 0; r < model.family_count(); ++r) {
      const ShockFamily& f = model.family(r);
      if (f.has_umbrella()) {
        const MeanCov& w = model.umbrella(r, c);
        check_poisson(w, "umbrella shock '" + f.name + "'");
        lambda += w.mean;
      }
      if (f.has_array_specific()) {
        const MeanCov& w = model.array_specific(n, r, c);
        check_poisson(w, "array-specific shock '" + f.name + "'");
        lambda += w.mean;
      }
    }
    return tweedie::Params{1.0, 0.0, lambda};
  }

  const double alpha = tweedie::alpha_of(p);
  double precision = 1.0 / z.nu;
  for (std::size_t r = 0; r < model.family_count(); ++r) {
    const ShockFamily& f = model.family(r);
    if (f.has_umbrella()) precision += 1.0 / model.umbrella(r, c).nu;
    if (f.has_array_specific()) precision += 1.0 / model.array_specific(n, r, c).nu;
  }
  const double mu_nu = z.mean * z.nu;
  return tweedie::Params{p, (alpha - 1.0) / mu_nu, std::pow(mu_nu, alpha) * precision};
}

double moment_multiple(const ShockModel& model, std::size_t n, const CellId& c) {
  const MeanCov& z = model.idiosyncratic(n, c);
  double bracket = 1.0;
  for (std::size_t r = 0; r < model.family_count(); ++r) {
    const ShockFamily& f = model.family(r);
    if (f.has_umbrella()) bracket += z.nu / model.umbrella(r, c).nu;
    if (f.has_array_specific()) bracket += z.nu / model.array_specific(n, r, c).nu;
  }
  return bracket;
}

CellMoments cell_moments(const ShockModel& model, std::size_t n, const CellId& c) {
  const MeanCov& z = model.idiosyncratic(n, c);
  const double bracket = moment_multiple(model, n, c);
  return {z.mean * bracket, z.variance() * bracket, z.nu / bracket};
}

std::string label(const ShockModel& model, const ContributionKey& key) {
  if (key.role == ShockRole::idiosyncratic) return "idiosyncratic";
  return std::string(to_string(key.role)) + "[" + model.family(key.family).name + "]";
}

std::vector<ContributionKey> contribution_keys(const ShockModel& model) {
  std::vector<ContributionKey> keys;
  for (std::size_t r = 0; r < model.family_count(); ++r)
    if (model.family(r).has_umbrella()) keys.push_back({ShockRole::umbrella, r});
  for (std::size_t r = 0; r < model.family_count(); ++r)
    if (model.family(r).has_array_specific())
      keys.push_back({ShockRole::array_specific, r});
  keys.push_back({ShockRole::idiosyncratic, 0});
  return keys;
}

std::vector<double> expected_contributions(const ShockModel& model, std::size_t n,
                                           const CellId& c) {
  const MeanCov& z = model.idiosyncratic(n, c);
  const double bracket = moment_multiple(model, n, c);
  std::vector<double> shares;
  for (const ContributionKey& key : contribution_keys(model)) {
    switch (key.role) {
      case ShockRole::umbrella:
        shares.push_back(z.nu / model.umbrella(key.family, c).nu / bracket);
        break;
      case ShockRole::array_specific:
        shares.push_back(z.nu / model.array_specific(n, key.family, c).nu / bracket);
        break;
      case ShockRole::idiosyncratic:
        shares.push_back(1.0 / bracket);
        break;
    }
  }
  return shares;
}

}  // namespace tcs
