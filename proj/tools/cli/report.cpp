// SPDX-License-Identifier: Apache-2.0
#include "report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace specstab::cli {

nlohmann::ordered_json json_complex(Complex z) {
  return nlohmann::ordered_json::array({z.real(), z.imag()});
}

nlohmann::ordered_json json_vector(const ComplexVector& v) {
  auto out = nlohmann::ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(json_complex(v(i)));
  return out;
}

nlohmann::ordered_json json_matrix(const ComplexMatrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(json_complex(m(i, j)));
    out.push_back(row);
  }
  return out;
}

nlohmann::ordered_json report_skeleton(const AnalysisConfig& config,
                                       const std::string& command) {
  nlohmann::ordered_json report;
  report["command"] = command;
  report["model"] = config.model;
  nlohmann::ordered_json provenance;
  provenance["config_hash"] = config_hash(config);
  provenance["tool_version"] = kToolVersion;
  provenance["seed"] = config.seed;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  provenance["timestamp"] = stamp;
  report["provenance"] = provenance;
  return report;
}

std::string format_double(double value) {
  // Shortest representation that round-trips, like the JSON writer.
  const nlohmann::ordered_json j = value;
  return j.dump();
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json Table::to_json() const {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t j = 0; j < header.size() && j < row.size(); ++j) {
      obj[header[j]] = row[j];
    }
    out.push_back(obj);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("--output", "cannot write '" + path + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

}  // namespace specstab::cli
