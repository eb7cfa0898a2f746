// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace specstab::cli {

namespace {

const std::set<std::string> kModels = {
    "split",     "coupled-heat",    "coupled-biharmonic",
    "wave-heat", "phs",             "heat-general-bc"};

double parse_double(const nlohmann::ordered_json& node,
                    const std::string& field) {
  if (!node.is_number()) throw ConfigError(field, "expected a number");
  return node.get<double>();
}

}  // namespace

Complex parse_complex(const nlohmann::ordered_json& node,
                      const std::string& field) {
  if (node.is_number()) return Complex(node.get<double>(), 0.0);
  if (node.is_array() && node.size() == 2) {
    return Complex(parse_double(node[0], field + "[0]"),
                   parse_double(node[1], field + "[1]"));
  }
  throw ConfigError(field, "expected a number or a [re, im] pair");
}

ComplexMatrix parse_matrix(const nlohmann::ordered_json& node,
                           const std::string& field) {
  if (!node.is_array() || node.empty()) {
    throw ConfigError(field, "expected a non-empty array of rows");
  }
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!node[i].is_array() || node[i].empty()) {
      throw ConfigError(field, "row " + std::to_string(i) +
                                   " is not a non-empty array");
    }
    if (i == 0) {
      cols = node[i].size();
    } else if (node[i].size() != cols) {
      throw ConfigError(field, "ragged rows");
    }
  }
  ComplexMatrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = parse_complex(
          node[i][j],
          field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return out;
}

AnalysisConfig parse_config(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected an object");

  AnalysisConfig config;
  if (!doc.contains("model") || !doc["model"].is_string()) {
    throw ConfigError("model", "required string");
  }
  config.model = doc["model"].get<std::string>();
  if (kModels.count(config.model) == 0) {
    throw ConfigError("model", "unknown model '" + config.model + "'");
  }

  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object()) {
      throw ConfigError("parameters", "expected an object");
    }
    config.parameters = doc["parameters"];
  } else {
    config.parameters = nlohmann::ordered_json::object();
  }

  if (doc.contains("grids")) {
    if (!doc["grids"].is_array()) {
      throw ConfigError("grids", "expected an array of node counts");
    }
    for (const auto& g : doc["grids"]) {
      if (!g.is_number_integer() || g.get<long long>() < 3) {
        throw ConfigError("grids", "node counts must be integers >= 3");
      }
      config.grids.push_back(static_cast<Index>(g.get<long long>()));
    }
  }

  if (doc.contains("tolerances")) {
    const auto& tol = doc["tolerances"];
    if (!tol.is_object()) throw ConfigError("tolerances", "expected an object");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      const std::string key = it.key();
      const double value = parse_double(it.value(), "tolerances." + key);
      if (!(value > 0.0)) {
        throw ConfigError("tolerances." + key, "must be positive");
      }
      if (key == "re_tol") {
        config.tolerances.re_tol = value;
      } else if (key == "class_tol") {
        config.tolerances.class_tol = value;
      } else {
        throw ConfigError("tolerances." + key, "unknown tolerance");
      }
    }
  }

  if (doc.contains("format")) {
    if (!doc["format"].is_string()) throw ConfigError("format", "expected a string");
    config.format = doc["format"].get<std::string>();
    if (config.format != "json" && config.format != "csv") {
      throw ConfigError("format", "must be 'json' or 'csv'");
    }
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) {
      throw ConfigError("seed", "expected an integer");
    }
    config.seed = doc["seed"].get<std::uint64_t>();
  }

  static const std::set<std::string> kKnown = {"model",      "parameters",
                                              "grids",      "tolerances",
                                              "format",     "seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (kKnown.count(it.key()) == 0) {
      throw ConfigError(it.key(), "unknown top-level field");
    }
  }

  config.canonical = doc.dump();
  return config;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<path>", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_hash(const AnalysisConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : config.canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(out);
}

}  // namespace specstab::cli
