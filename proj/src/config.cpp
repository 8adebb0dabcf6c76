#include "tcs/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tcs::config {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing required field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

CellId cell(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer())
    fail(path, "expected a cell [row, column]");
  return {v[0].get<int>(), v[1].get<int>()};
}

std::vector<CellId> cell_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of cells");
  std::vector<CellId> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(cell(v[k], path + "/" + std::to_string(k)));
  return out;
}

json cell_json(const CellId& c) { return json::array({c.row, c.col}); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(path, "unknown field '" + it.key() + "'");
}

// --- value-table rules ------------------------------------------------------

enum class TableScope { subset, cell };

struct Site {
  CellId cell;            // cell, or the smallest cell of a subset
  std::size_t index = 0;  // 0-based subset ordinal (subset scope)
};

double evaluate(const json& rule, const Site& site, TableScope scope, std::size_t subsets,
                const std::string& path);

double indexed(const json& rule, const char* key, int index, const std::string& path) {
  const json& vec = rule.at(key);
  if (!vec.is_array() || vec.empty()) fail(path + "/" + key, "expected a non-empty list");
  const int start = rule.contains("start") ? integer(rule["start"], path + "/start") : 1;
  int k = index - start;
  const int size = static_cast<int>(vec.size());
  if (k >= size && rule.contains("pad")) {
    if (rule["pad"] != "repeat-last") fail(path + "/pad", "only \"repeat-last\" is supported");
    k = size - 1;
  }
  if (k < 0 || k >= size)
    fail(path + "/" + key, "no entry for index " + std::to_string(index) + " (list covers " +
                               std::to_string(start) + ".." + std::to_string(start + size - 1) +
                               ")");
  return number(vec[static_cast<std::size_t>(k)], path + "/" + key + "/" + std::to_string(k));
}

double evaluate(const json& rule, const Site& site, TableScope scope, std::size_t subsets,
                const std::string& path) {
  if (rule.is_number()) return rule.get<double>();
  if (!rule.is_object()) fail(path, "expected a number or a table rule object");

  double value = 0.0;
  if (rule.contains("constant")) {
    check_keys(rule, {"constant", "scale", "row_growth"}, path);
    value = number(rule["constant"], path + "/constant");
  } else if (rule.contains("values")) {
    if (scope != TableScope::subset) fail(path, "'values' is only valid for subset tables");
    check_keys(rule, {"values", "scale"}, path);
    const json& vec = rule["values"];
    if (!vec.is_array() || vec.size() != subsets)
      fail(path + "/values", "expected " + std::to_string(subsets) + " entries (one per subset)");
    value = number(vec[site.index], path + "/values/" + std::to_string(site.index));
  } else if (rule.contains("by_subset")) {
    if (scope != TableScope::subset) fail(path, "'by_subset' is only valid for subset tables");
    check_keys(rule, {"by_subset", "scale"}, path);
    const json& map = rule["by_subset"];
    if (!map.is_object()) fail(path + "/by_subset", "expected an object keyed by subset number");
    for (auto it = map.begin(); it != map.end(); ++it) {
      std::size_t pos = 0;
      long key = -1;
      try {
        key = std::stol(it.key(), &pos);
      } catch (const std::exception&) {
      }
      if (pos != it.key().size() || key < 1 || static_cast<std::size_t>(key) > subsets)
        fail(path + "/by_subset", "unknown subset reference '" + it.key() + "' (partition has " +
                                      std::to_string(subsets) + " subsets)");
    }
    const std::string key = std::to_string(site.index + 1);
    if (!map.contains(key)) fail(path + "/by_subset", "no value for subset " + key);
    value = number(map[key], path + "/by_subset/" + key);
  } else if (rule.contains("matrix")) {
    if (scope != TableScope::cell) fail(path, "'matrix' is only valid for cell tables");
    check_keys(rule, {"matrix", "scale"}, path);
    const json& m = rule["matrix"];
    const auto i = static_cast<std::size_t>(site.cell.row - 1);
    const auto j = static_cast<std::size_t>(site.cell.col - 1);
    if (!m.is_array() || i >= m.size() || !m[i].is_array() || j >= m[i].size())
      fail(path + "/matrix", "no entry for cell " + to_string(site.cell));
    value = number(m[i][j], path + "/matrix/" + std::to_string(i) + "/" + std::to_string(j));
  } else if (rule.contains("by_row") || rule.contains("by_column") || rule.contains("by_diagonal")) {
    check_keys(rule, {"by_row", "by_column", "by_diagonal", "start", "pad", "scale", "row_growth"},
               path);
    if (rule.contains("by_row"))
      value = indexed(rule, "by_row", site.cell.row, path);
    else if (rule.contains("by_column"))
      value = indexed(rule, "by_column", site.cell.col, path);
    else
      value = indexed(rule, "by_diagonal", site.cell.diagonal(), path);
  } else if (rule.contains("piecewise")) {
    check_keys(rule, {"piecewise"}, path);
    const json& pieces = rule["piecewise"];
    if (!pieces.is_array()) fail(path + "/piecewise", "expected a list of pieces");
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const std::string ppath = path + "/piecewise/" + std::to_string(k);
      const json& rows = member(pieces[k], "rows", ppath);
      if (!rows.is_array() || rows.size() != 2) fail(ppath + "/rows", "expected [first, last]");
      const int lo = integer(rows[0], ppath + "/rows/0");
      const int hi = integer(rows[1], ppath + "/rows/1");
      if (site.cell.row >= lo && site.cell.row <= hi)
        return evaluate(member(pieces[k], "value", ppath), site, scope, subsets, ppath + "/value");
    }
    fail(path + "/piecewise", "no piece covers row " + std::to_string(site.cell.row));
  } else {
    fail(path, "unrecognised table rule");
  }

  if (rule.contains("row_growth"))
    value *= std::pow(number(rule["row_growth"], path + "/row_growth"), site.cell.row - 1);
  if (rule.contains("scale")) value *= number(rule["scale"], path + "/scale");
  return value;
}

// A component table holds "mean" and either "nu" (squared CoV) or "cov".
template <class SiteFn>
std::vector<MeanCov> component_table(const json& obj, std::size_t count, SiteFn site_of,
                                     TableScope scope, std::size_t subsets,
                                     const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object with 'mean' and 'nu' or 'cov'");
  check_keys(obj, {"mean", "nu", "cov"}, path);
  const json& mean = member(obj, "mean", path);
  const bool has_nu = obj.contains("nu");
  const bool has_cov = obj.contains("cov");
  if (has_nu == has_cov) fail(path, "give exactly one of 'nu' and 'cov'");
  const json& spread = has_nu ? obj["nu"] : obj["cov"];
  const std::string spath = path + (has_nu ? "/nu" : "/cov");

  std::vector<MeanCov> out;
  for (std::size_t k = 0; k < count; ++k) {
    const Site site = site_of(k);
    const double m = evaluate(mean, site, scope, subsets, path + "/mean");
    double v = evaluate(spread, site, scope, subsets, spath);
    if (!(m > 0.0) || !std::isfinite(m))
      fail(path + "/mean", "value at " + to_string(site.cell) + " must be positive");
    if (!(v > 0.0) || !std::isfinite(v))
      fail(spath, "value at " + to_string(site.cell) + " must be positive");
    if (has_cov) v *= v;
    out.push_back({m, v});
  }
  return out;
}

std::vector<MeanCov> subset_table(const json& obj, const Partition& part,
                                  const std::string& path) {
  return component_table(
      obj, part.size(), [&](std::size_t s) { return Site{part.subsets()[s].front(), s}; },
      TableScope::subset, part.size(), path);
}

Grid<MeanCov> cell_table(const json& obj, const ArrayLayout& layout, const std::string& path) {
  const auto& cells = layout.cells();
  const auto values = component_table(
      obj, cells.size(), [&](std::size_t k) { return Site{cells[k], 0}; }, TableScope::cell, 0,
      path);
  Grid<MeanCov> grid(layout.rows(), layout.cols(), MeanCov{0.0, 0.0});
  for (std::size_t k = 0; k < cells.size(); ++k) grid[cells[k]] = values[k];
  return grid;
}

ArrayLayout parse_grid(const json& g) {
  const std::string path = "/grid";
  check_keys(g, {"rows", "cols", "mask"}, path);
  const int rows = integer(member(g, "rows", path), path + "/rows");
  const int cols = integer(member(g, "cols", path), path + "/cols");
  if (rows < 1 || cols < 1) fail(path, "rows and cols must be positive");
  if (!g.contains("mask") || g["mask"] == "full") return ArrayLayout::full(rows, cols);
  const json& mask = g["mask"];
  if (mask == "triangle") {
    if (rows != cols) fail(path + "/mask", "a triangle needs rows == cols");
    return ArrayLayout::triangle(rows);
  }
  if (mask.is_object() && mask.contains("cells")) {
    try {
      return ArrayLayout::from_cells(rows, cols, cell_list(mask["cells"], path + "/mask/cells"));
    } catch (const InvalidPartition& e) {
      fail(path + "/mask/cells", e.what());
    }
  }
  fail(path + "/mask", "expected \"full\", \"triangle\" or {\"cells\": [...]}");
}

Partition parse_partition(const json& p, const ArrayLayout& grid, const std::string& path) {
  const json& kind_json = member(p, "kind", path);
  if (!kind_json.is_string()) fail(path + "/kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();
  try {
    if (kind == "split-diagonal")
      return split_diagonal_partition(grid, integer(member(p, "split_row", path), path + "/split_row"));
    const auto parsed = parse_partition_kind(kind);
    if (!parsed) fail(path + "/kind", "unknown partition kind '" + kind + "'");
    if (*parsed != PartitionKind::custom) return standard_partition(grid, *parsed);
    const json& subsets = member(p, "subsets", path);
    if (!subsets.is_array()) fail(path + "/subsets", "expected a list of cell lists");
    std::vector<std::vector<CellId>> cells;
    for (std::size_t s = 0; s < subsets.size(); ++s)
      cells.push_back(cell_list(subsets[s], path + "/subsets/" + std::to_string(s)));
    return custom_partition(grid, std::move(cells));
  } catch (const InvalidPartition& e) {
    fail(path + "/subsets", std::string("invalid partition: ") + e.what());
  }
}

}  // namespace

ShockModel parse_model(const json& doc) {
  if (!doc.is_object()) fail("", "model document must be a JSON object");
  check_keys(doc, {"format", "name", "notes", "power", "grid", "arrays", "partitions"}, "");
  if (doc.contains("format") && doc["format"] != kFormatTag)
    fail("/format", std::string("unsupported format (expected \"") + kFormatTag + "\")");
  const std::string name = doc.contains("name") && doc["name"].is_string()
                               ? doc["name"].get<std::string>()
                               : std::string("model");
  const double p = number(member(doc, "power", ""), "/power");
  if (!tweedie::admissible_power(p)) fail("/power", "power must lie in (-inf, 0] U [1, inf)");
  const ArrayLayout grid = parse_grid(member(doc, "grid", ""));

  const json& arrays_json = member(doc, "arrays", "");
  if (!arrays_json.is_array() || arrays_json.empty())
    fail("/arrays", "expected a non-empty list of arrays");
  std::vector<ClaimArray> arrays;
  for (std::size_t n = 0; n < arrays_json.size(); ++n) {
    const std::string path = "/arrays/" + std::to_string(n);
    const json& a = arrays_json[n];
    check_keys(a, {"name", "exclude", "cells", "idiosyncratic"}, path);
    ClaimArray arr;
    arr.name = a.contains("name") ? a["name"].get<std::string>() : "array-" + std::to_string(n + 1);
    if (a.contains("cells")) {
      const auto cells = cell_list(a["cells"], path + "/cells");
      for (const CellId& c : cells)
        if (!grid.contains(c)) fail(path + "/cells", "cell " + to_string(c) + " is not in the grid");
      arr.layout = ArrayLayout::from_cells(grid.rows(), grid.cols(), cells);
    } else {
      arr.layout = grid;
    }
    if (a.contains("exclude")) arr.layout = arr.layout.without(cell_list(a["exclude"], path + "/exclude"));
    arr.idiosyncratic = cell_table(member(a, "idiosyncratic", path), arr.layout, path + "/idiosyncratic");
    arrays.push_back(std::move(arr));
  }

  std::vector<ShockFamily> families;
  if (doc.contains("partitions")) {
    const json& parts = doc["partitions"];
    if (!parts.is_array()) fail("/partitions", "expected a list");
    for (std::size_t r = 0; r < parts.size(); ++r) {
      const std::string path = "/partitions/" + std::to_string(r);
      const json& pj = parts[r];
      check_keys(pj, {"name", "kind", "split_row", "subsets", "umbrella", "array_specific"}, path);
      Partition part = parse_partition(pj, grid, path);
      std::optional<std::vector<MeanCov>> umbrella;
      std::optional<std::vector<std::vector<MeanCov>>> array_specific;
      if (pj.contains("umbrella")) umbrella = subset_table(pj["umbrella"], part, path + "/umbrella");
      if (pj.contains("array_specific")) {
        const json& tables = pj["array_specific"];
        if (!tables.is_array() || tables.size() != arrays.size())
          fail(path + "/array_specific",
               "expected one table per array (" + std::to_string(arrays.size()) + ")");
        array_specific.emplace();
        for (std::size_t n = 0; n < tables.size(); ++n)
          array_specific->push_back(
              subset_table(tables[n], part, path + "/array_specific/" + std::to_string(n)));
      }
      const std::string fname = pj.contains("name") ? pj["name"].get<std::string>()
                                                    : std::string(to_string(part.kind()));
      families.push_back({fname, std::move(part), std::move(umbrella), std::move(array_specific)});
    }
  }
  return ShockModel(name, p, grid, std::move(arrays), std::move(families));
}

namespace {

json emit_subset_table(const std::vector<MeanCov>& table) {
  json mean = json::array();
  json nu = json::array();
  for (const MeanCov& mc : table) {
    mean.push_back(mc.mean);
    nu.push_back(mc.nu);
  }
  return {{"mean", {{"values", mean}}}, {"nu", {{"values", nu}}}};
}

json emit_cell_table(const Grid<MeanCov>& table, const ArrayLayout& layout) {
  json mean = json::array();
  json nu = json::array();
  for (int i = 1; i <= layout.rows(); ++i) {
    json mrow = json::array();
    json nrow = json::array();
    for (int j = 1; j <= layout.cols(); ++j) {
      if (layout.contains({i, j})) {
        mrow.push_back(table[{i, j}].mean);
        nrow.push_back(table[{i, j}].nu);
      } else {
        mrow.push_back(nullptr);
        nrow.push_back(nullptr);
      }
    }
    mean.push_back(std::move(mrow));
    nu.push_back(std::move(nrow));
  }
  return {{"mean", {{"matrix", mean}}}, {"nu", {{"matrix", nu}}}};
}

json emit_grid(const ArrayLayout& grid) {
  json g = {{"rows", grid.rows()}, {"cols", grid.cols()}};
  if (grid == ArrayLayout::full(grid.rows(), grid.cols())) {
    g["mask"] = "full";
  } else if (grid.rows() == grid.cols() && grid == ArrayLayout::triangle(grid.rows())) {
    g["mask"] = "triangle";
  } else {
    json cells = json::array();
    for (const CellId& c : grid.cells()) cells.push_back(cell_json(c));
    g["mask"] = {{"cells", cells}};
  }
  return g;
}

}  // namespace

json emit_model(const ShockModel& model) {
  json doc;
  doc["format"] = kFormatTag;
  doc["name"] = model.name();
  doc["power"] = model.p();
  doc["grid"] = emit_grid(model.grid());

  json arrays = json::array();
  for (const ClaimArray& a : model.arrays()) {
    json aj;
    aj["name"] = a.name;
    json excluded = json::array();
    for (const CellId& c : model.grid().cells())
      if (!a.layout.contains(c)) excluded.push_back(cell_json(c));
    if (!excluded.empty()) aj["exclude"] = excluded;
    aj["idiosyncratic"] = emit_cell_table(a.idiosyncratic, a.layout);
    arrays.push_back(std::move(aj));
  }
  doc["arrays"] = arrays;

  json parts = json::array();
  for (const ShockFamily& f : model.families()) {
    json pj;
    pj["name"] = f.name;
    if (f.partition.split_row()) {
      pj["kind"] = "split-diagonal";
      pj["split_row"] = *f.partition.split_row();
    } else {
      pj["kind"] = std::string(to_string(f.partition.kind()));
      if (f.partition.kind() == PartitionKind::custom) {
        json subsets = json::array();
        for (const auto& s : f.partition.subsets()) {
          json cells = json::array();
          for (const CellId& c : s) cells.push_back(cell_json(c));
          subsets.push_back(std::move(cells));
        }
        pj["subsets"] = subsets;
      }
    }
    if (f.umbrella) pj["umbrella"] = emit_subset_table(*f.umbrella);
    if (f.array_specific) {
      json tables = json::array();
      for (const auto& t : *f.array_specific) tables.push_back(emit_subset_table(t));
      pj["array_specific"] = tables;
    }
    parts.push_back(std::move(pj));
  }
  doc["partitions"] = parts;
  return doc;
}

json read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ShockModel load_model(const std::filesystem::path& path) {
  return parse_model(read_document(path));
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace tcs::config
