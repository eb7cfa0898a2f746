// SPDX-License-Identifier: Apache-2.0
#include "build_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "report.hpp"
#include "specstab/closure.hpp"
#include "specstab/coupled.hpp"
#include "specstab/discretize.hpp"
#include "specstab/phs.hpp"
#include "specstab/stability.hpp"

namespace specstab::cli {

namespace {

using nlohmann::ordered_json;

ordered_json json_number_or_inf(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

/// Scalar coefficient: a number, a [re, im] pair, or a piecewise-constant
/// {breakpoints, values} block.
ScalarCoefficient parse_scalar_coefficient(const ordered_json& node,
                                           const std::string& field) {
  if (node.is_number() || (node.is_array() && node.size() == 2 &&
                           node[0].is_number())) {
    const Complex value = parse_complex(node, field);
    return [value](double) { return value; };
  }
  if (node.is_object() && node.contains("values")) {
    PiecewiseConstant pw;
    if (node.contains("breakpoints")) {
      if (!node["breakpoints"].is_array()) {
        throw ConfigError(field + ".breakpoints", "expected an array");
      }
      for (const auto& b : node["breakpoints"]) {
        if (!b.is_number()) {
          throw ConfigError(field + ".breakpoints", "expected numbers");
        }
        pw.breakpoints.push_back(b.get<double>());
      }
    }
    if (!node["values"].is_array() || node["values"].empty()) {
      throw ConfigError(field + ".values", "expected a non-empty array");
    }
    std::size_t index = 0;
    for (const auto& v : node["values"]) {
      pw.values.push_back(
          parse_complex(v, field + ".values[" + std::to_string(index) + "]"));
      ++index;
    }
    validate(pw);
    return [pw](double zeta) { return pw.at(zeta); };
  }
  throw ConfigError(field,
                    "expected a number, [re, im], or {breakpoints, values}");
}

MatrixCoefficient parse_matrix_coefficient(const ordered_json& node,
                                           const std::string& field) {
  if (node.is_object() && node.contains("constant")) {
    const ComplexMatrix value = parse_matrix(node["constant"], field + ".constant");
    return [value](double) { return value; };
  }
  throw ConfigError(field, "expected {constant: matrix}");
}

WeightedSpace parse_space(const ordered_json& params, const std::string& key,
                          Index dim) {
  if (!params.contains(key)) return WeightedSpace::identity(dim);
  const auto& node = params[key];
  if (node.is_string() && node.get<std::string>() == "identity") {
    return WeightedSpace::identity(dim);
  }
  if (node.is_object() && node.contains("diagonal")) {
    const auto& diag = node["diagonal"];
    if (!diag.is_array() || static_cast<Index>(diag.size()) != dim) {
      throw ConfigError(key + ".diagonal",
                        "expected " + std::to_string(dim) + " numbers");
    }
    RealVector d(dim);
    for (Index i = 0; i < dim; ++i) {
      if (!diag[static_cast<std::size_t>(i)].is_number()) {
        throw ConfigError(key + ".diagonal", "expected numbers");
      }
      d(i) = diag[static_cast<std::size_t>(i)].get<double>();
    }
    return WeightedSpace::from_diagonal(d);
  }
  if (node.is_object() && node.contains("weight")) {
    return WeightedSpace::from_weight(parse_matrix(node["weight"], key + ".weight"));
  }
  throw ConfigError(key, "expected 'identity', {diagonal}, or {weight}");
}

Index first_grid(const AnalysisConfig& config,
                 std::optional<Index> grid_override) {
  if (grid_override) return *grid_override;
  if (config.grids.empty()) {
    throw ConfigError("grids", "this model needs at least one grid size");
  }
  return config.grids.front();
}

AssessOptions assess_options(const AnalysisConfig& config) {
  AssessOptions opts;
  opts.re_tol = config.tolerances.re_tol;
  opts.class_tol = config.tolerances.class_tol;
  return opts;
}

ordered_json stability_block(const StabilityVerdict& verdict) {
  ordered_json out;
  out["classification"] = to_string(verdict.classification);
  out["abscissa"] = verdict.abscissa;
  out["growth_bound"] = verdict.growth_bound;
  out["strict_margin"] = verdict.strict_margin;
  auto peripheral = ordered_json::array();
  for (const Complex z : verdict.peripheral_eigs) {
    peripheral.push_back(json_complex(z));
  }
  out["peripheral_eigenvalues"] = peripheral;
  return out;
}

/// Largest angular deviation of the operator's numerical range from the
/// negative real axis, measured through boundary support points. Every
/// dissipative operator whose range avoids the origin-adjacent ball of
/// radius tol contributes; pi/2 means no sector statement.
double sector_half_angle(const ComplexMatrix& a, const WeightedSpace& space) {
  const auto points = numerical_range_boundary(a, space, 256);
  const double tol = 1e-12 * (1.0 + a.norm());
  double half = 0.0;
  for (const Complex z : points) {
    if (std::abs(z) <= tol) continue;
    half = std::max(half, std::abs(std::arg(-z)));
  }
  return half;
}

BuiltModel build_split(const AnalysisConfig& config) {
  const auto& p = config.parameters;
  for (const char* key : {"a11", "a12", "a21", "s"}) {
    if (!p.contains(key)) {
      throw ConfigError(std::string("parameters.") + key, "required matrix");
    }
  }
  SplitClosureSystem sys;
  sys.a11 = parse_matrix(p["a11"], "parameters.a11");
  sys.a12 = parse_matrix(p["a12"], "parameters.a12");
  sys.a21 = parse_matrix(p["a21"], "parameters.a21");
  sys.s = parse_matrix(p["s"], "parameters.s");
  sys.space1 = parse_space(p, "space1", sys.a11.rows());
  sys.space2 = parse_space(p, "space2", sys.s.rows());
  validate(sys);

  BuiltModel out;
  out.op = assemble_a_s(sys);
  out.space = sys.space1;

  const StructureVerdict structure = check_structure(sys);
  ordered_json sj;
  sj["s_coercive"] = structure.s_coercive;
  sj["coercivity"] = structure.coercivity;
  sj["skew_pairing"] = structure.skew_pairing;
  sj["pairing_residual"] = structure.pairing_residual;
  sj["a11_dissipative"] = structure.a11_dissipative;
  sj["a11_abscissa"] = structure.a11_abscissa;
  sj["a_ext_dissipative"] = structure.a_ext_dissipative;
  sj["a_ext_abscissa"] = structure.a_ext_abscissa;
  sj["all_hypotheses"] = structure.all_hypotheses();
  out.check["structure"] = sj;
  out.check["stability"] =
      stability_block(assess_stability(out.op, out.space, assess_options(config)));
  out.check["sector_half_angle"] = sector_half_angle(out.op, out.space);
  out.hypotheses_ok = structure.all_hypotheses();
  return out;
}

CoupledParabolicSpec coupled_spec_from(const AnalysisConfig& config,
                                       std::optional<Index> grid_override,
                                       CoupledKind kind) {
  const auto& p = config.parameters;
  CoupledParabolicSpec spec;
  spec.kind = kind;
  spec.grid = {0.0, 1.0, first_grid(config, grid_override)};
  if (!p.contains("n_components") ||
      !p["n_components"].is_number_integer()) {
    throw ConfigError("parameters.n_components", "required integer");
  }
  spec.n_components = p["n_components"].get<Index>();
  if (!p.contains("potential") || !p["potential"].is_array() ||
      p["potential"].empty()) {
    throw ConfigError("parameters.potential", "required non-empty array");
  }
  std::size_t index = 0;
  for (const auto& node : p["potential"]) {
    const std::string field =
        "parameters.potential[" + std::to_string(index) + "]";
    if (!node.is_object() || !node.contains("lo") || !node.contains("hi") ||
        !node.contains("v")) {
      throw ConfigError(field, "expected {lo, hi, v}");
    }
    PotentialPiece piece;
    piece.lo = parse_complex(node["lo"], field + ".lo").real();
    piece.hi = parse_complex(node["hi"], field + ".hi").real();
    piece.v = parse_matrix(node["v"], field + ".v");
    spec.potential.push_back(std::move(piece));
    ++index;
  }
  if (p.contains("coefficients")) {
    if (!p["coefficients"].is_array()) {
      throw ConfigError("parameters.coefficients", "expected an array");
    }
    std::size_t k = 0;
    for (const auto& node : p["coefficients"]) {
      spec.coefficients.push_back(parse_scalar_coefficient(
          node, "parameters.coefficients[" + std::to_string(k) + "]"));
      ++k;
    }
  }
  return spec;
}

BuiltModel build_coupled(const AnalysisConfig& config,
                         std::optional<Index> grid_override, CoupledKind kind) {
  const CoupledParabolicSpec spec =
      coupled_spec_from(config, grid_override, kind);
  const CoupledOperator coupled = build_coupled_operator(spec);

  BuiltModel out;
  out.op = coupled.c;
  out.space = coupled.space;

  const std::vector<bool> flags = check_v_dissipative(spec);
  const VConditionVerdict condition = check_v_condition(spec);
  ordered_json pj;
  auto piece_flags = ordered_json::array();
  auto piece_abscissas = ordered_json::array();
  bool all_dissipative = true;
  for (std::size_t j = 0; j < spec.potential.size(); ++j) {
    piece_flags.push_back(static_cast<bool>(flags[j]));
    all_dissipative = all_dissipative && flags[j];
    const ComplexMatrix& v = spec.potential[j].v;
    piece_abscissas.push_back(
        numerical_abscissa(v, WeightedSpace::identity(v.rows())));
  }
  pj["per_piece_dissipative"] = piece_flags;
  pj["per_piece_abscissa"] = piece_abscissas;
  pj["all_dissipative"] = all_dissipative;
  pj["condition_holds"] = condition.holds;
  if (condition.failing_beta) {
    pj["failing_beta"] = *condition.failing_beta;
  } else {
    pj["failing_beta"] = nullptr;
  }
  pj["limit_projection_defined"] = all_dissipative && condition.holds;
  out.check["potential"] = pj;
  out.check["stability"] =
      stability_block(assess_stability(out.op, out.space, assess_options(config)));
  out.hypotheses_ok = all_dissipative;
  return out;
}

BuiltModel build_wave_heat(const AnalysisConfig& config,
                           std::optional<Index> grid_override) {
  WaveHeatSpec spec;
  const Index n1 = first_grid(config, grid_override);
  Index n2 = n1;
  if (!grid_override && config.grids.size() >= 2) n2 = config.grids[1];
  spec.grid1 = {0.0, 1.0, n1};
  spec.grid2 = {1.0, 2.0, n2};
  if (config.parameters.contains("s")) {
    spec.s = parse_scalar_coefficient(config.parameters["s"], "parameters.s");
  } else {
    spec.s = [](double) { return Complex(1.0); };
  }
  const WaveHeatSystem sys = wave_heat_build(spec);

  BuiltModel out;
  out.op = sys.a_s.a_restricted;
  out.space = WeightedSpace::identity(out.op.rows());
  out.is_wave_heat = true;

  const double ext_abscissa = numerical_abscissa(
      sys.a_ext.a_restricted,
      WeightedSpace::identity(sys.a_ext.a_restricted.rows()));
  const double ext_scale = 1.0 + sys.a_ext.a_free.norm();
  const StabilityVerdict verdict =
      assess_stability(out.op, out.space, assess_options(config));
  out.check["stability"] = stability_block(verdict);
  ordered_json ej;
  ej["extended_abscissa"] = ext_abscissa;
  ej["extended_dissipative"] = ext_abscissa <= 1e-10 * ext_scale;
  out.check["energy"] = ej;
  out.check["hyperbolic_min_decay"] = json_number_or_inf(hyperbolic_min_decay(
      eig(out.op).report.eigenvalues));
  out.hypotheses_ok = ext_abscissa <= 1e-10 * ext_scale;
  return out;
}

PHSystemSpec phs_spec_from(const AnalysisConfig& config,
                           std::optional<Index> grid_override) {
  const auto& p = config.parameters;
  PHSystemSpec spec;
  for (const char* key : {"n", "r"}) {
    if (!p.contains(key) || !p[key].is_number_integer()) {
      throw ConfigError(std::string("parameters.") + key, "required integer");
    }
  }
  spec.n = p["n"].get<Index>();
  spec.r = p["r"].get<Index>();
  for (const char* key : {"p0", "p1", "g0", "g1", "tilde_wb"}) {
    if (!p.contains(key)) {
      throw ConfigError(std::string("parameters.") + key, "required matrix");
    }
  }
  spec.p0 = parse_matrix(p["p0"], "parameters.p0");
  spec.p1 = parse_matrix(p["p1"], "parameters.p1");
  spec.g0 = parse_matrix(p["g0"], "parameters.g0");
  spec.g1 = parse_matrix(p["g1"], "parameters.g1");
  spec.tilde_wb = parse_matrix(p["tilde_wb"], "parameters.tilde_wb");
  if (p.contains("hamiltonian")) {
    spec.hamiltonian =
        parse_matrix_coefficient(p["hamiltonian"], "parameters.hamiltonian");
  }
  if (p.contains("s")) {
    spec.s = parse_matrix_coefficient(p["s"], "parameters.s");
  }
  spec.grid = {0.0, 1.0, first_grid(config, grid_override)};
  return spec;
}

ordered_json heat_conditions_block(const HeatConditionReport& conditions,
                                   const HeatSigmaReport& sigma) {
  ordered_json out;
  out["cond1"] = conditions.cond1;
  out["c1"] = json_number_or_inf(conditions.c1);
  out["cond2"] = conditions.cond2;
  out["c2"] = json_number_or_inf(conditions.c2);
  out["cond3"] = conditions.cond3;
  out["sigma_matrix"] = json_matrix(sigma.matrix);
  out["sigma_psd"] = sigma.psd;
  out["sigma_pd"] = sigma.pd;
  return out;
}

BuiltModel finish_ph_model(const AnalysisConfig& config,
                           const PHSystemSpec& spec,
                           const PHSpecBounds& bounds) {
  const BoundaryCheckReport boundary = boundary_report(spec);
  const PHDiscretization disc = discretize_L(spec);

  BuiltModel out;
  out.op = disc.a_s.a_restricted;
  out.space = WeightedSpace::identity(out.op.rows());

  ordered_json bj;
  bj["hamiltonian_floor"] = bounds.hamiltonian_floor;
  bj["s_coercivity"] = bounds.coercivity;
  bj["p1ext_invertible"] = boundary.p1ext_invertible;
  bj["generation_psd"] = boundary.generation_psd;
  bj["generation_min_eigenvalue"] = boundary.generation_min_eigenvalue;
  bj["g1_rank_n"] = boundary.g1_rank_n;
  if (boundary.p1ext_invertible) bj["wb"] = json_matrix(boundary.wb);
  if (boundary.heat_conditions) {
    bj["heat"] = heat_conditions_block(boundary.heat_conditions->conditions,
                                       boundary.heat_conditions->sigma);
  }
  out.check["boundary"] = bj;

  const double ext_abscissa = numerical_abscissa(
      disc.a_ext.a_restricted,
      WeightedSpace::identity(disc.a_ext.a_restricted.rows()));
  out.check["extended_abscissa"] = ext_abscissa;
  out.check["stability"] =
      stability_block(assess_stability(out.op, out.space, assess_options(config)));
  out.hypotheses_ok = boundary.p1ext_invertible;
  return out;
}

BuiltModel build_phs(const AnalysisConfig& config,
                     std::optional<Index> grid_override) {
  const PHSystemSpec spec = phs_spec_from(config, grid_override);
  const PHSpecBounds bounds = validate(spec);
  return finish_ph_model(config, spec, bounds);
}

BuiltModel build_heat_general_bc(const AnalysisConfig& config,
                                 std::optional<Index> grid_override) {
  const auto& p = config.parameters;
  if (!p.contains("tilde_wb")) {
    throw ConfigError("parameters.tilde_wb", "required 2x4 matrix");
  }
  PHSystemSpec spec;
  spec.n = 1;
  spec.r = 1;
  spec.p0 = ComplexMatrix::Zero(1, 1);
  spec.p1 = ComplexMatrix::Zero(1, 1);
  spec.g0 = ComplexMatrix::Zero(1, 1);
  spec.g1 = ComplexMatrix::Identity(1, 1);
  spec.tilde_wb = parse_matrix(p["tilde_wb"], "parameters.tilde_wb");
  ScalarCoefficient s = [](double) { return Complex(1.0); };
  if (p.contains("s")) s = parse_scalar_coefficient(p["s"], "parameters.s");
  spec.s = [s](double zeta) {
    ComplexMatrix value(1, 1);
    value(0, 0) = s(zeta);
    return value;
  };
  spec.grid = {0.0, 1.0, first_grid(config, grid_override)};
  const PHSpecBounds bounds = validate(spec);
  return finish_ph_model(config, spec, bounds);
}

}  // namespace

BuiltModel build_model(const AnalysisConfig& config,
                       std::optional<Index> grid_override) {
  if (config.model == "split") {
    if (grid_override) {
      throw ConfigError("--grids", "the split model has no grid to sweep");
    }
    return build_split(config);
  }
  if (config.model == "coupled-heat") {
    return build_coupled(config, grid_override, CoupledKind::Heat);
  }
  if (config.model == "coupled-biharmonic") {
    return build_coupled(config, grid_override, CoupledKind::Biharmonic);
  }
  if (config.model == "wave-heat") return build_wave_heat(config, grid_override);
  if (config.model == "phs") return build_phs(config, grid_override);
  if (config.model == "heat-general-bc") {
    return build_heat_general_bc(config, grid_override);
  }
  throw ConfigError("model", "unknown model '" + config.model + "'");
}

}  // namespace specstab::cli
