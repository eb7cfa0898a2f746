// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include <json.hpp>

#include "config.hpp"
#include "specstab/numkernel.hpp"

namespace specstab::cli {

/// A model instantiated from a config: the operator that spectrum,
/// simulate and resolvent act on, its geometry, and the hypothesis-check
/// verdict block for the `check` command.
struct BuiltModel {
  ComplexMatrix op;
  WeightedSpace space = WeightedSpace::identity(0);
  bool hypotheses_ok = true;
  nlohmann::ordered_json check;
  bool is_wave_heat = false;  // sweeps add the oscillatory decay margin
};

/// Builds the model named by the config. grid_override replaces the first
/// grid size (sweeps). Throws ConfigError for schema problems and
/// InvalidInput when the data violates a standing hypothesis.
BuiltModel build_model(const AnalysisConfig& config,
                       std::optional<Index> grid_override = {});

}  // namespace specstab::cli
