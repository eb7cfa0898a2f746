// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "specstab/types.hpp"

namespace specstab::cli {

inline constexpr const char* kToolVersion = "specstab 1.0.0";

nlohmann::ordered_json json_complex(Complex z);
nlohmann::ordered_json json_vector(const ComplexVector& v);
nlohmann::ordered_json json_matrix(const ComplexMatrix& m);

/// Report skeleton: provenance block with config hash, tool version and a
/// UTC timestamp. The timestamp is the only field excluded from hashing
/// and from byte-identity comparisons.
nlohmann::ordered_json report_skeleton(const AnalysisConfig& config,
                                       const std::string& command);

/// One tabular payload; renders as a JSON object (rows keyed by header) or
/// as CSV with one header row. Complex-valued columns must be split into
/// two real columns by the caller, per the output contract.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
};

/// Writes to the path, or to stdout when the path is empty.
void write_text(const std::string& path, const std::string& text);

/// Formats a double the way nlohmann::json does, so CSV and JSON agree.
std::string format_double(double value);

}  // namespace specstab::cli
