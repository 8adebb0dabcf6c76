#include "tcs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace tcs::report {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string sig(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string condition_name(BalanceCondition c) {
  return c == BalanceCondition::umbrella_multiple ? "a" : "b";
}

// "1-10, 12, 14-15" for a sorted list of columns.
std::string runs(const std::vector<int>& cols) {
  std::string out;
  for (std::size_t k = 0; k < cols.size();) {
    std::size_t e = k;
    while (e + 1 < cols.size() && cols[e + 1] == cols[e] + 1) ++e;
    if (!out.empty()) out += ", ";
    out += std::to_string(cols[k]);
    if (e > k) out += "-" + std::to_string(cols[e]);
    k = e + 1;
  }
  return out;
}

}  // namespace

bool ShareRange::constant(double tol) const noexcept {
  return std::abs(max - min) <= tol * std::max(std::abs(max), std::abs(min));
}

std::vector<ShareRange> expected_share_ranges(const ShockModel& model) {
  const auto keys = contribution_keys(model);
  std::vector<ShareRange> out;
  for (std::size_t n = 0; n < model.array_count(); ++n) {
    std::vector<ShareRange> ranges;
    for (const auto& key : keys) ranges.push_back({n, key, INFINITY, -INFINITY});
    for (const CellId& c : model.array(n).layout.cells()) {
      const auto shares = expected_contributions(model, n, c);
      for (std::size_t q = 0; q < shares.size(); ++q) {
        ranges[q].min = std::min(ranges[q].min, shares[q]);
        ranges[q].max = std::max(ranges[q].max, shares[q]);
      }
    }
    out.insert(out.end(), ranges.begin(), ranges.end());
  }
  return out;
}

std::string percent(double share) { return fmt("%.1f%%", 100.0 * share); }

std::string balance_text(const BalanceReport& report, const ShockModel& model) {
  std::ostringstream os;
  os << "model " << model.name() << ": " << (report.balanced ? "balanced" : "unbalanced")
     << " (relative tolerance " << sig(report.tolerance, 3) << ")\n";
  for (std::size_t n = 0; n < report.arrays.size(); ++n) {
    const ArrayBalance& ab = report.arrays[n];
    os << "  " << model.array(n).name << ":";
    if (ab.umbrella_multiple)
      os << " C = " << sig(*ab.umbrella_multiple, 10) << " (chi = " << ab.umbrella_terms << ")";
    if (ab.array_specific_multiple)
      os << " K = " << sig(*ab.array_specific_multiple, 10)
         << " (chi_n = " << ab.array_specific_terms << ")";
    if (report.balanced)
      os << " kappa = " << sig(kappa(report, n), 10);
    else
      os << " violations = " << ab.violations;
    os << "\n";
  }
  if (!report.violations.empty()) {
    os << "violations:\n";
    for (const BalanceViolation& v : report.violations)
      os << "  " << model.array(v.array).name << " cell " << to_string(v.cell) << " family "
         << model.family(v.family).name << " condition (" << condition_name(v.condition)
         << "): nu ratio " << sig(v.observed, 10) << ", expected " << sig(v.expected, 10) << "\n";
  }
  const auto failures = report.constancy.failures();
  os << "class constancy: " << (failures.empty() ? "passed" : "failed") << " ("
     << report.constancy.findings.size() << " checks)\n";
  for (const ConstancyFinding& f : failures)
    os << "  " << model.array(f.array).name << " class " << f.class_index + 1 << " "
       << to_string(f.role) << "[" << model.family(f.family).name << "]: nu ranges "
       << sig(f.min_nu, 8) << " .. " << sig(f.max_nu, 8) << "\n";
  return os.str();
}

nlohmann::json balance_json(const BalanceReport& report, const ShockModel& model) {
  using nlohmann::json;
  json doc;
  doc["model"] = model.name();
  doc["balanced"] = report.balanced;
  doc["tolerance"] = report.tolerance;
  json arrays = json::array();
  for (std::size_t n = 0; n < report.arrays.size(); ++n) {
    const ArrayBalance& ab = report.arrays[n];
    json a;
    a["name"] = model.array(n).name;
    a["chi"] = ab.umbrella_terms;
    a["chi_n"] = ab.array_specific_terms;
    a["C"] = ab.umbrella_multiple ? json(*ab.umbrella_multiple) : json(nullptr);
    a["K"] = ab.array_specific_multiple ? json(*ab.array_specific_multiple) : json(nullptr);
    a["kappa"] = report.balanced ? json(kappa(report, n)) : json(nullptr);
    a["violations"] = ab.violations;
    arrays.push_back(std::move(a));
  }
  doc["arrays"] = arrays;
  json violations = json::array();
  for (const BalanceViolation& v : report.violations)
    violations.push_back({{"array", model.array(v.array).name},
                          {"cell", {v.cell.row, v.cell.col}},
                          {"family", model.family(v.family).name},
                          {"condition", condition_name(v.condition)},
                          {"observed", v.observed},
                          {"expected", v.expected}});
  doc["violations"] = violations;
  json failures = json::array();
  for (const ConstancyFinding& f : report.constancy.failures())
    failures.push_back({{"array", model.array(f.array).name},
                        {"family", model.family(f.family).name},
                        {"shock", std::string(to_string(f.role))},
                        {"class", f.class_index + 1},
                        {"min_nu", f.min_nu},
                        {"max_nu", f.max_nu}});
  doc["class_constancy"] = {{"passed", report.constancy.passed()},
                            {"checks", report.constancy.findings.size()},
                            {"failures", failures}};
  return doc;
}

void write_moments_csv(std::ostream& out, const ShockModel& model, std::size_t n,
                       int significant_digits) {
  out << "array,row,col,mean,variance,sq_cov\n";
  for (const CellId& c : model.array(n).layout.cells()) {
    const CellMoments m = cell_moments(model, n, c);
    out << csv_field(model.array(n).name) << ',' << c.row << ',' << c.col << ','
        << sig(m.mean, significant_digits) << ',' << sig(m.variance, significant_digits) << ','
        << sig(m.sq_cov, significant_digits) << '\n';
  }
}

std::string contributions_text(const ShockModel& model) {
  std::ostringstream os;
  os << "Expected proportions of cell expectation, model " << model.name() << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-32s %8s  %s\n", "array", "component", "share", "cells");
  os << line;
  for (const ShareRange& r : expected_share_ranges(model)) {
    const std::string name = label(model, r.key);
    if (r.constant())
      std::snprintf(line, sizeof line, "%-16s %-32s %8s  all cells\n",
                    model.array(r.array).name.c_str(), name.c_str(), percent(r.min).c_str());
    else
      std::snprintf(line, sizeof line, "%-16s %-32s %8s  varies, %s to %s\n",
                    model.array(r.array).name.c_str(), name.c_str(), "-",
                    percent(r.min).c_str(), percent(r.max).c_str());
    os << line;
  }
  return os.str();
}

void write_contribution_csv(std::ostream& out, const ContributionTable& table,
                            const ShockModel& model, std::size_t replication) {
  const ArrayLayout& layout = model.array(table.array).layout;
  out << "dataset," << csv_field(model.name()) << ",array," << csv_field(model.array(table.array).name)
      << ",shock," << csv_field(label(model, table.key)) << ",replication," << replication + 1
      << '\n';
  out << "accident_period";
  for (int j = 1; j <= layout.cols(); ++j) out << ',' << j;
  out << '\n';
  for (int i = 1; i <= layout.rows(); ++i) {
    out << i;
    for (int j = 1; j <= layout.cols(); ++j) {
      out << ',';
      const auto& v = table.values[{i, j}];
      if (layout.contains({i, j}) && v) out << fmt("%.6f", *v);
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SimulationResult& result,
                       const ShockModel& model) {
  const auto summary = empirical_summary(result, model);
  out << "array,row,col,analytic_mean,sample_mean,mean_se,analytic_variance,sample_variance,"
         "variance_se";
  for (const auto& key : result.keys) {
    const std::string l = label(model, key);
    out << ',' << csv_field("expected_" + l) << ',' << csv_field("realized_" + l);
  }
  out << ",excluded\n";
  for (std::size_t n = 0; n < summary.size(); ++n) {
    for (const CellEmpirical& e : summary[n]) {
      const CellMoments m = cell_moments(model, n, e.cell);
      const auto expected = expected_contributions(model, n, e.cell);
      out << csv_field(model.array(n).name) << ',' << e.cell.row << ',' << e.cell.col << ','
          << sig(m.mean) << ',' << sig(e.mean) << ',' << sig(e.mean_se) << ','
          << sig(m.variance) << ',' << sig(e.variance) << ',' << sig(e.variance_se);
      for (std::size_t q = 0; q < expected.size(); ++q) {
        out << ',' << sig(expected[q]) << ',';
        if (!std::isnan(e.mean_fractions[q])) out << sig(e.mean_fractions[q]);
      }
      out << ',' << e.excluded << '\n';
    }
  }
}

std::string classes_text(const ShockModel& model) {
  std::ostringstream os;
  const auto per_array = model_equivalence_classes(model);
  for (std::size_t n = 0; n < per_array.size(); ++n) {
    const auto& classes = per_array[n].classes();
    os << model.array(n).name << ": " << classes.size() << " equivalence class"
       << (classes.size() == 1 ? "" : "es") << "\n";
    for (std::size_t h = 0; h < classes.size(); ++h) {
      const auto& cells = classes[h];
      os << "  class " << h + 1 << ": " << cells.size() << " cell" << (cells.size() == 1 ? "" : "s")
         << "\n";
      for (std::size_t k = 0; k < cells.size();) {
        const int row = cells[k].row;
        std::vector<int> cols;
        while (k < cells.size() && cells[k].row == row) cols.push_back(cells[k++].col);
        os << "    row " << row << ": cols " << runs(cols) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace tcs::report
