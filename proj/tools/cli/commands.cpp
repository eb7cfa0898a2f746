// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cmath>

#include "build_model.hpp"
#include "report.hpp"
#include "specstab/phs.hpp"
#include "specstab/rng.hpp"
#include "specstab/stability.hpp"

namespace specstab::cli {

namespace {

using nlohmann::ordered_json;

void emit(const AnalysisConfig& config, const std::string& command,
          ordered_json body, const std::string& output) {
  ordered_json report = report_skeleton(config, command);
  for (auto it = body.begin(); it != body.end(); ++it) {
    report[it.key()] = it.value();
  }
  write_text(output, report.dump(2));
}

/// Seeded unit-norm probe state in the operator's coordinates.
ComplexVector probe_state(const BuiltModel& model, std::uint64_t seed) {
  Rng rng(seed + 0x9e3779b97f4a7c15ull);
  ComplexVector x0 = rng.matrix(model.op.rows(), 1);
  const double norm = model.space.norm(x0);
  if (norm > 0.0) x0 /= norm;
  return x0;
}

}  // namespace

int run_check(const AnalysisConfig& config, const std::string& output) {
  const BuiltModel model = build_model(config);
  ordered_json body;
  body["hypotheses_ok"] = model.hypotheses_ok;
  body["verdicts"] = model.check;
  emit(config, "check", body, output);
  return model.hypotheses_ok ? 0 : 2;
}

int run_spectrum(const AnalysisConfig& config, const std::string& output) {
  const BuiltModel model = build_model(config);
  const auto report = eig(model.op).report;
  if (config.format == "csv") {
    Table table;
    table.header = {"re", "im"};
    for (const Complex lambda : report.eigenvalues) {
      table.rows.push_back({lambda.real(), lambda.imag()});
    }
    write_text(output, table.to_csv());
    return 0;
  }
  ordered_json body;
  auto values = ordered_json::array();
  for (const Complex lambda : report.eigenvalues) {
    values.push_back(json_complex(lambda));
  }
  body["eigenvalues"] = values;
  body["max_real_part"] = report.max_real_part;
  body["re_tol"] = report.re_tol;
  auto peripheral = ordered_json::array();
  for (const Index i : report.peripheral) peripheral.push_back(i);
  body["peripheral_indices"] = peripheral;
  emit(config, "spectrum", body, output);
  return 0;
}

int run_simulate(const AnalysisConfig& config, const SimulateFlags& flags,
                 const std::string& output) {
  const auto scheme = parse_scheme(flags.scheme);
  if (!scheme) {
    throw ConfigError("--scheme", "unknown scheme '" + flags.scheme + "'");
  }
  if (!(flags.t_end > 0.0) || !(flags.dt > 0.0)) {
    throw ConfigError("--t-end/--dt", "must be positive");
  }
  const BuiltModel model = build_model(config);
  const ComplexVector x0 = probe_state(model, config.seed);
  const Trajectory traj =
      propagate(model.op, model.space, x0, flags.t_end, flags.dt, *scheme);
  if (config.format == "csv") {
    Table table;
    table.header = {"t", "norm"};
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      table.rows.push_back({traj.times[k], traj.norms[k]});
    }
    write_text(output, table.to_csv());
    return 0;
  }
  ordered_json body;
  body["scheme"] = to_string(*scheme);
  body["times"] = traj.times;
  body["norms"] = traj.norms;
  body["final_norm"] = traj.norms.empty() ? 0.0 : traj.norms.back();
  emit(config, "simulate", body, output);
  return 0;
}

int run_resolvent(const AnalysisConfig& config, const ResolventFlags& flags,
                  const std::string& output) {
  if (flags.samples < 2) throw ConfigError("--samples", "need at least 2");
  if (!(flags.omega_max > flags.omega_min)) {
    throw ConfigError("--omega-max", "must exceed --omega-min");
  }
  const BuiltModel model = build_model(config);
  std::vector<double> omegas(static_cast<std::size_t>(flags.samples));
  for (Index k = 0; k < flags.samples; ++k) {
    omegas[static_cast<std::size_t>(k)] =
        flags.omega_min + (flags.omega_max - flags.omega_min) *
                              static_cast<double>(k) /
                              static_cast<double>(flags.samples - 1);
  }
  const auto scan = resolvent_norm_scan(model.op, model.space, omegas);
  if (config.format == "csv") {
    Table table;
    table.header = {"omega", "norm", "singular"};
    for (const auto& sample : scan) {
      table.rows.push_back({sample.omega,
                            sample.singular ? 0.0 : sample.norm,
                            sample.singular ? 1.0 : 0.0});
    }
    write_text(output, table.to_csv());
    return 0;
  }
  ordered_json body;
  auto rows = ordered_json::array();
  double sup = 0.0;
  bool unbounded = false;
  for (const auto& sample : scan) {
    ordered_json row;
    row["omega"] = sample.omega;
    if (sample.singular) {
      row["norm"] = nullptr;
      unbounded = true;
    } else {
      row["norm"] = sample.norm;
      sup = std::max(sup, sample.norm);
    }
    row["singular"] = sample.singular;
    rows.push_back(row);
  }
  body["samples"] = rows;
  body["sup_norm"] = sup;
  body["unbounded"] = unbounded;
  emit(config, "resolvent", body, output);
  return 0;
}

int run_sweep(const AnalysisConfig& config, const std::vector<Index>& grids,
              const std::string& output) {
  const std::vector<Index>& sizes = grids.empty() ? config.grids : grids;
  if (sizes.empty()) {
    throw ConfigError("--grids", "no grid sizes given (flag or config)");
  }
  std::vector<std::string> header = {"n", "dim", "growth_bound", "abscissa"};
  bool with_decay = false;
  Table table;
  auto rows_json = ordered_json::array();
  for (const Index n : sizes) {
    const BuiltModel model = build_model(config, n);
    const auto report = eig(model.op).report;
    const double abscissa = numerical_abscissa(model.op, model.space);
    std::vector<double> row = {static_cast<double>(n),
                               static_cast<double>(model.op.rows()),
                               report.max_real_part, abscissa};
    ordered_json obj;
    obj["n"] = n;
    obj["dim"] = model.op.rows();
    obj["growth_bound"] = report.max_real_part;
    obj["abscissa"] = abscissa;
    if (model.is_wave_heat) {
      with_decay = true;
      const double decay = hyperbolic_min_decay(report.eigenvalues);
      row.push_back(decay);
      obj["hyperbolic_min_decay"] = decay;
    }
    table.rows.push_back(std::move(row));
    rows_json.push_back(obj);
  }
  if (with_decay) header.push_back("hyperbolic_min_decay");
  table.header = header;
  if (config.format == "csv") {
    write_text(output, table.to_csv());
    return 0;
  }
  ordered_json body;
  body["sweep"] = rows_json;
  emit(config, "sweep", body, output);
  return 0;
}

}  // namespace specstab::cli
