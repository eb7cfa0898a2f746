// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace specstab::cli {

struct SimulateFlags {
  double t_end = 1.0;
  double dt = 0.01;
  std::string scheme = "crank-nicolson";
};

struct ResolventFlags {
  double omega_min = -10.0;
  double omega_max = 10.0;
  Index samples = 51;
};

int run_check(const AnalysisConfig& config, const std::string& output);
int run_spectrum(const AnalysisConfig& config, const std::string& output);
int run_simulate(const AnalysisConfig& config, const SimulateFlags& flags,
                 const std::string& output);
int run_resolvent(const AnalysisConfig& config, const ResolventFlags& flags,
                  const std::string& output);
int run_sweep(const AnalysisConfig& config, const std::vector<Index>& grids,
              const std::string& output);
int run_reproduce(const std::string& case_name, const std::string& output);

}  // namespace specstab::cli
