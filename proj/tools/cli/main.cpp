// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Exit codes: 0 success, 1 usage or I/O error,
// 2 hypothesis violation or reference mismatch.
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "specstab/types.hpp"

namespace {

void apply_thread_override() {
#ifdef _OPENMP
  if (const char* threads = std::getenv("THREADS")) {
    const int count = std::atoi(threads);
    if (count > 0) omp_set_num_threads(count);
  }
#endif
}

}  // namespace

int main(int argc, char** argv) {
  using namespace specstab;
  using namespace specstab::cli;

  apply_thread_override();

  CLI::App app{"spectral and stability analysis for closure-relation models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::string case_name;
  SimulateFlags sim;
  ResolventFlags res;
  std::vector<Index> grid_list;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("config", config_path, "path to a JSON analysis config")
          ->required();
    }
    cmd->add_option("--output", output, "write the report here instead of stdout");
  };

  CLI::App* cmd_check =
      app.add_subcommand("check", "verify the model hypotheses");
  add_common(cmd_check, true);

  CLI::App* cmd_spectrum =
      app.add_subcommand("spectrum", "eigenvalues of the closed operator");
  add_common(cmd_spectrum, true);

  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "propagate a probe state in time");
  add_common(cmd_simulate, true);
  cmd_simulate->add_option("--t-end", sim.t_end, "final time");
  cmd_simulate->add_option("--dt", sim.dt, "time step");
  cmd_simulate->add_option("--scheme", sim.scheme,
                           "crank-nicolson, backward-euler, or expm");

  CLI::App* cmd_resolvent = app.add_subcommand(
      "resolvent", "resolvent norms along the imaginary axis");
  add_common(cmd_resolvent, true);
  cmd_resolvent->add_option("--omega-min", res.omega_min, "lowest frequency");
  cmd_resolvent->add_option("--omega-max", res.omega_max, "highest frequency");
  cmd_resolvent->add_option("--samples", res.samples, "number of frequencies");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "repeat the spectral summary across grids");
  add_common(cmd_sweep, true);
  cmd_sweep->add_option("--grids", grid_list, "comma-separated grid sizes")
      ->delimiter(',');

  CLI::App* cmd_reproduce =
      app.add_subcommand("reproduce", "run a recorded reference case");
  cmd_reproduce->add_option("case", case_name, "reference case name")
      ->required();
  add_common(cmd_reproduce, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (cmd_reproduce->parsed()) return run_reproduce(case_name, output);
    const AnalysisConfig config = load_config(config_path);
    if (cmd_check->parsed()) return run_check(config, output);
    if (cmd_spectrum->parsed()) return run_spectrum(config, output);
    if (cmd_simulate->parsed()) return run_simulate(config, sim, output);
    if (cmd_resolvent->parsed()) return run_resolvent(config, res, output);
    if (cmd_sweep->parsed()) return run_sweep(config, grid_list, output);
    std::cerr << "error: no command selected\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
