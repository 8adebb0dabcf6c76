#include "tcs/balance.hpp"

#include <algorithm>
#include <cmath>

namespace tcs {
namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

struct RatioSample {
  CellId cell;
  std::size_t family;
  double ratio;
};

// Ratio agreed on by the most samples; earliest sample wins ties. Ratios are
// positive, so |a - b| <= tol max(a, b) is the window [a (1 - tol), a / (1 - tol)].
double consensus(const std::vector<RatioSample>& samples, double tol) {
  std::vector<double> sorted;
  sorted.reserve(samples.size());
  for (const RatioSample& s : samples) sorted.push_back(s.ratio);
  std::sort(sorted.begin(), sorted.end());
  std::size_t best = 0;
  std::ptrdiff_t best_count = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double a = samples[k].ratio;
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), a * (1.0 - tol));
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), a / (1.0 - tol));
    const std::ptrdiff_t count = hi - lo;
    if (count > best_count) {
      best = k;
      best_count = count;
    }
  }
  return samples[best].ratio;
}

}  // namespace

bool ClassConstancy::passed() const noexcept {
  return std::all_of(findings.begin(), findings.end(),
                     [](const ConstancyFinding& f) { return f.constant; });
}

std::vector<ConstancyFinding> ClassConstancy::failures() const {
  std::vector<ConstancyFinding> out;
  std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
               [](const ConstancyFinding& f) { return !f.constant; });
  return out;
}

BalanceReport check_auto_balance(const ShockModel& model, double tol) {
  BalanceReport report;
  report.tolerance = tol;

  for (std::size_t n = 0; n < model.array_count(); ++n) {
    ArrayBalance ab;
    ab.umbrella_terms = model.umbrella_terms();
    ab.array_specific_terms = model.array_specific_terms();

    for (BalanceCondition cond :
         {BalanceCondition::umbrella_multiple, BalanceCondition::array_specific_multiple}) {
      std::vector<RatioSample> samples;
      for (const CellId& c : model.array(n).layout.cells()) {
        const double nu_ij = model.idiosyncratic(n, c).nu;
        for (std::size_t r = 0; r < model.family_count(); ++r) {
          const ShockFamily& f = model.family(r);
          if (cond == BalanceCondition::umbrella_multiple && f.has_umbrella())
            samples.push_back({c, r, nu_ij / model.umbrella(r, c).nu});
          if (cond == BalanceCondition::array_specific_multiple && f.has_array_specific())
            samples.push_back({c, r, nu_ij / model.array_specific(n, r, c).nu});
        }
      }
      if (samples.empty()) continue;
      const double multiple = consensus(samples, tol);
      for (const RatioSample& s : samples) {
        if (close_rel(s.ratio, multiple, tol)) continue;
        report.violations.push_back({n, s.cell, s.family, cond, s.ratio, multiple});
        ++ab.violations;
      }
      (cond == BalanceCondition::umbrella_multiple ? ab.umbrella_multiple
                                                   : ab.array_specific_multiple) = multiple;
    }
    report.arrays.push_back(ab);
  }

  report.constancy = check_class_constancy(model, model_equivalence_classes(model), tol);
  report.balanced = report.violations.empty();
  return report;
}

double kappa(const BalanceReport& report, std::size_t n) {
  if (!report.balanced) throw InvalidState("kappa requested for an unbalanced model");
  const ArrayBalance& ab = report.arrays.at(n);
  double k = 1.0;
  if (ab.umbrella_multiple)
    k += *ab.umbrella_multiple * static_cast<double>(ab.umbrella_terms);
  if (ab.array_specific_multiple)
    k += *ab.array_specific_multiple * static_cast<double>(ab.array_specific_terms);
  return k;
}

CellMoments balanced_cell_moments(const BalanceReport& report, const ShockModel& model,
                                  std::size_t n, const CellId& c) {
  const double k = kappa(report, n);
  const MeanCov& z = model.idiosyncratic(n, c);
  return {k * z.mean, k * z.variance(), z.nu / k};
}

std::vector<EquivalenceClasses> model_equivalence_classes(const ShockModel& model) {
  std::vector<EquivalenceClasses> out;
  for (const ClaimArray& a : model.arrays()) {
    std::vector<Partition> parts;
    for (const ShockFamily& f : model.families())
      parts.push_back(f.partition.restricted_to(a.layout));
    out.push_back(equivalence_classes(a.layout, parts));
  }
  return out;
}

ClassConstancy check_class_constancy(const ShockModel& model,
                                     const std::vector<EquivalenceClasses>& per_array,
                                     double tol) {
  ClassConstancy out;
  for (std::size_t n = 0; n < model.array_count() && n < per_array.size(); ++n) {
    const auto& classes = per_array[n].classes();
    for (std::size_t r = 0; r < model.family_count(); ++r) {
      const ShockFamily& f = model.family(r);
      for (ShockRole role : {ShockRole::umbrella, ShockRole::array_specific}) {
        if (role == ShockRole::umbrella && !f.has_umbrella()) continue;
        if (role == ShockRole::array_specific && !f.has_array_specific()) continue;
        for (std::size_t h = 0; h < classes.size(); ++h) {
          ConstancyFinding finding{n, r, role, h, 0.0, 0.0, true};
          bool first = true;
          for (const CellId& c : classes[h]) {
            const double nu = role == ShockRole::umbrella
                                  ? model.umbrella(r, c).nu
                                  : model.array_specific(n, r, c).nu;
            if (first) {
              finding.min_nu = finding.max_nu = nu;
              first = false;
            }
            finding.min_nu = std::min(finding.min_nu, nu);
            finding.max_nu = std::max(finding.max_nu, nu);
          }
          finding.constant = close_rel(finding.min_nu, finding.max_nu, tol);
          out.findings.push_back(finding);
        }
      }
    }
  }
  return out;
}

}  // namespace tcs
