#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tcs/shock_model.hpp"

// JSON model documents. See docs/config-format.md for the layout and the
// value-table rules (constants, per-row/column/diagonal vectors, geometric
// row growth, piecewise row ranges, explicit values).
namespace tcs::config {

inline constexpr const char* kFormatTag = "tweedie-common-shock-model/1";

// Throws ConfigError with a JSON-pointer path for every schema problem.
ShockModel parse_model(const nlohmann::json& doc);

// Fully resolved document: explicit per-subset values and per-cell matrices,
// squared CoVs under "nu". parse_model(emit_model(m)) == m.
nlohmann::json emit_model(const ShockModel& model);

nlohmann::json read_document(const std::filesystem::path& path);
ShockModel load_model(const std::filesystem::path& path);

// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::json& doc);

}  // namespace tcs::config
