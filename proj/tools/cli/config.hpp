// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specstab/types.hpp"

namespace specstab::cli {

/// Config or schema problem: names the offending field and the reason.
/// Maps to the usage/IO exit code.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& reason)
      : std::runtime_error("config field '" + field + "': " + reason) {}
};

struct ToleranceSet {
  std::optional<double> re_tol;     // peripheral band half-width
  std::optional<double> class_tol;  // classification threshold
};

/// Parsed analysis configuration. `parameters` keeps the model-specific
/// block as raw JSON; the model builder validates it field by field.
struct AnalysisConfig {
  std::string model;
  nlohmann::ordered_json parameters;
  std::vector<Index> grids;
  ToleranceSet tolerances;
  std::string format = "json";  // json | csv
  std::uint64_t seed = 0;
  std::string canonical;  // normalized dump, the hashing input
};

AnalysisConfig parse_config(const std::string& text);
AnalysisConfig load_config(const std::string& path);

/// FNV-1a 64-bit over the canonical config dump, as fixed-width hex.
std::string config_hash(const AnalysisConfig& config);

/// Matrix/vector/coefficient decoding shared by the model builders. All
/// throw ConfigError with the offending field name.
ComplexMatrix parse_matrix(const nlohmann::ordered_json& node,
                           const std::string& field);
Complex parse_complex(const nlohmann::ordered_json& node,
                      const std::string& field);

}  // namespace specstab::cli
