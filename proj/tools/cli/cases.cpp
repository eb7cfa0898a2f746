// SPDX-License-Identifier: Apache-2.0
// Canned reproduction cases: each runs a fixed configuration and compares
// against recorded expectations with pinned tolerances.
#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "report.hpp"
#include "specstab/closure.hpp"
#include "specstab/coupled.hpp"
#include "specstab/phs.hpp"
#include "specstab/rng.hpp"
#include "specstab/stability.hpp"

namespace specstab::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct CaseCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

using CaseRunner = std::function<void(std::vector<CaseCheck>&)>;

std::string num(double value) {
  std::ostringstream out;
  out.precision(3);
  out << std::scientific << value;
  return out.str();
}

void add(std::vector<CaseCheck>& checks, const std::string& name, bool pass,
         const std::string& detail) {
  checks.push_back({name, pass, detail});
}

ComplexMatrix nonlocal_wb() {
  ComplexMatrix wb(2, 4);
  wb << 0, 1, 1, -1,
        1, 1, 0, 0;
  return wb;
}

ComplexMatrix dirichlet_wb() {
  ComplexMatrix wb(2, 4);
  wb << 1, 0, 0, 0,
        0, 0, 1, 0;
  return wb;
}

PHSystemSpec scalar_heat_spec(const ComplexMatrix& tilde_wb) {
  PHSystemSpec spec;
  spec.n = 1;
  spec.r = 1;
  spec.p0 = ComplexMatrix::Zero(1, 1);
  spec.p1 = ComplexMatrix::Zero(1, 1);
  spec.g0 = ComplexMatrix::Zero(1, 1);
  spec.g1 = ComplexMatrix::Identity(1, 1);
  spec.tilde_wb = tilde_wb;
  spec.grid = {0.0, 1.0, 11};
  return spec;
}

const ScalarCoefficient kUnitDiffusion = [](double) { return Complex(1.0); };

void heat_stability_checks(std::vector<CaseCheck>& checks,
                           const ComplexMatrix& tilde_wb) {
  double reference = 0.0;
  std::map<Index, double> growth;
  for (const Index n : {100, 200, 400}) {
    const PHDiscretization disc =
        heat_general_bc(tilde_wb, kUnitDiffusion, {0.0, 1.0, n});
    growth[n] = eig(disc.a_s.a_restricted).report.max_real_part;
    if (n == 400) reference = growth[n];
  }
  add(checks, "uniform decay margin", growth[200] <= -0.5,
      "max Re eig at n=200 is " + num(growth[200]) + " (needs <= -0.5)");
  bool stable = true;
  for (const Index n : {100, 200}) {
    stable = stable &&
             std::abs(growth[n] - reference) <= 0.2 * std::abs(reference);
  }
  add(checks, "growth bound stable across n in {100,200,400}", stable,
      "n=100: " + num(growth[100]) + ", n=200: " + num(growth[200]) +
          ", n=400: " + num(reference));

  const PHDiscretization disc =
      heat_general_bc(tilde_wb, kUnitDiffusion, {0.0, 1.0, 200});
  const double rate = eig(disc.a_s.a_restricted).report.max_real_part;
  ComplexVector x0(disc.a_s.a_restricted.rows());
  for (Index i = 0; i < x0.size(); ++i) {
    x0(i) = Complex(1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i)));
  }
  const Trajectory traj = propagate(
      disc.a_s.a_restricted, WeightedSpace::identity(x0.size()), x0,
      4.0 / std::abs(rate), 0.01 / std::abs(rate), Scheme::CrankNicolson);
  const double fitted = decay_rate_fit(traj, 0.5);
  add(checks, "observed decay matches spectrum within 10%",
      std::abs(fitted - rate) <= 0.1 * std::abs(rate),
      "fitted " + num(fitted) + " vs spectral " + num(rate));
}

void case_turing(std::vector<CaseCheck>& checks) {
  ComplexMatrix a(3, 3);
  a << 0, -1, 1,
       1, 0, 0,
       -1, 0, -1;
  ComplexMatrix b(3, 3);
  b << 0, 2, -1,
       -2, 0, 0,
       1, 0, -1;
  const auto sum = eig((a + b).eval()).report;
  const std::vector<Complex> expected = {{-2.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
  double deviation = 0.0;
  for (const Complex e : expected) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex lambda : sum.eigenvalues) {
      best = std::min(best, std::abs(lambda - e));
    }
    deviation = std::max(deviation, best);
  }
  add(checks, "spectrum of the sum is {-2, i, -i}", deviation <= 1e-10,
      "max deviation " + num(deviation));

  const WeightedSpace id3 = WeightedSpace::identity(3);
  for (const auto& [name, m] : {std::pair<const char*, ComplexMatrix&>{"A", a},
                                {"B", b}}) {
    const double abscissa = numerical_abscissa(m, id3);
    const double growth = eig(m).report.max_real_part;
    add(checks, std::string("summand ") + name + " is dissipative, not stable",
        std::abs(abscissa) <= 1e-12 && growth < 0.0,
        "abscissa " + num(abscissa) + ", max Re eig " + num(growth));
  }
}

void case_sector_diag(std::vector<CaseCheck>& checks) {
  ComplexMatrix a = ComplexMatrix::Zero(10, 10);
  for (Index k = 0; k < 10; ++k) {
    const double n2 = static_cast<double>((k + 1) * (k + 1));
    a(k, k) = Complex(-n2, -n2);
  }
  const WeightedSpace space = WeightedSpace::identity(10);
  const auto points = numerical_range_boundary(a, space, 256);
  const Complex rotate = std::polar(1.0, 3.0 * kPi / 4.0);
  double off_ray = 0.0;
  double half_angle = 0.0;
  for (const Complex z : points) {
    const Complex w = z * rotate;  // the ray lands on the positive reals
    off_ray = std::max(off_ray, std::abs(w.imag()));
    off_ray = std::max(off_ray, std::max(0.0, -w.real()));
    if (std::abs(z) > 1e-8) {
      half_angle = std::max(half_angle, std::abs(std::arg(-z)));
    }
  }
  add(checks, "numerical range boundary lies on arg z = -3pi/4",
      off_ray <= 1e-10, "max distance from the ray " + num(off_ray));
  add(checks, "sector half-angle is pi/4",
      std::abs(half_angle - kPi / 4.0) <= 1e-9,
      "half-angle " + num(half_angle) + " vs " + num(kPi / 4.0));
  const StabilityVerdict verdict = assess_stability(a, space);
  add(checks, "classified strictly dissipative",
      verdict.classification == StabilityClass::StrictlyDissipative,
      std::string("classification ") + to_string(verdict.classification));
}

void case_heat_nonlocal(std::vector<CaseCheck>& checks) {
  const HeatSigmaReport sigma = heat_bc_sigma_matrix(nonlocal_wb());
  ComplexMatrix expected(2, 2);
  expected << 2, 1, 1, 2;
  add(checks, "sigma matrix equals [[2,1],[1,2]] exactly",
      (sigma.matrix - expected).norm() == 0.0,
      "difference norm " + num((sigma.matrix - expected).norm()));
  add(checks, "sigma matrix positive definite", sigma.pd,
      sigma.pd ? "PD verdict true" : "PD verdict false");
  heat_stability_checks(checks, nonlocal_wb());
}

void case_heat_dirichlet(std::vector<CaseCheck>& checks) {
  const HeatConditionReport conditions =
      heat_stability_conditions(dirichlet_wb());
  add(checks, "all three exponential-stability conditions false",
      !conditions.cond1 && !conditions.cond2 && !conditions.cond3,
      std::string("cond1 ") + (conditions.cond1 ? "true" : "false") +
          ", cond2 " + (conditions.cond2 ? "true" : "false") + ", cond3 " +
          (conditions.cond3 ? "true" : "false"));

  const PHDiscretization disc =
      heat_general_bc(dirichlet_wb(), kUnitDiffusion, {0.0, 1.0, 400});
  const double leading = eig(disc.a_s.a_restricted).report.eigenvalues.front().real();
  const double target = -kPi * kPi;
  add(checks, "leading eigenvalue within 1% of -pi^2",
      std::abs(leading - target) <= 0.01 * std::abs(target),
      "leading " + num(leading) + " vs " + num(target));

  const BoundaryCheckReport report =
      boundary_report(scalar_heat_spec(dirichlet_wb()));
  add(checks, "still generates a contraction semigroup", report.generation_psd,
      "generation min eigenvalue " + num(report.generation_min_eigenvalue));
}

void case_heat_robin(std::vector<CaseCheck>& checks) {
  ComplexMatrix c(2, 2);
  c << 1, 2, 0, 3;
  ComplexMatrix wb(2, 4);
  wb << c(0, 1), 0.0, c(0, 0), -1.0,
        c(1, 1), 1.0, c(1, 0), 0.0;
  const HeatSigmaReport sigma = heat_bc_sigma_matrix(wb);
  add(checks, "sigma matrix equals C + C* exactly",
      (sigma.matrix - (c + c.adjoint())).norm() == 0.0,
      "difference norm " + num((sigma.matrix - (c + c.adjoint())).norm()));
  add(checks, "sigma matrix positive definite", sigma.pd,
      sigma.pd ? "PD verdict true" : "PD verdict false");
  const HeatConditionReport conditions = heat_stability_conditions(wb);
  add(checks, "definite route implies both endpoint routes",
      conditions.cond3 && conditions.cond1 && conditions.cond2,
      "c1 " + num(conditions.c1) + ", c2 " + num(conditions.c2));
  const PHDiscretization disc =
      heat_general_bc(wb, kUnitDiffusion, {0.0, 1.0, 200});
  const double growth = eig(disc.a_s.a_restricted).report.max_real_part;
  add(checks, "discrete operator exponentially stable", growth < 0.0,
      "max Re eig " + num(growth));
}

void case_wave_heat(std::vector<CaseCheck>& checks) {
  WaveHeatSpec spec;
  spec.s = kUnitDiffusion;
  spec.grid1 = {0.0, 1.0, 100};
  spec.grid2 = {1.0, 2.0, 100};
  const WaveHeatSystem sys = wave_heat_build(spec);
  const auto report = eig(sys.a_s.a_restricted).report;
  bool strictly_left = true;
  double min_abs_re = std::numeric_limits<double>::infinity();
  for (const Complex lambda : report.eigenvalues) {
    strictly_left = strictly_left && lambda.real() < 0.0;
    min_abs_re = std::min(min_abs_re, std::abs(lambda.real()));
  }
  add(checks, "all eigenvalues strictly left of the axis",
      strictly_left && min_abs_re > 1e-8,
      "min |Re eig| " + num(min_abs_re));

  Rng rng(2026);
  ComplexVector x0 = rng.matrix(sys.a_s.a_restricted.rows(), 1);
  const Trajectory traj = propagate(
      sys.a_s.a_restricted, WeightedSpace::identity(x0.size()), x0, 4.0, 0.02,
      Scheme::CrankNicolson);
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.norms.size(); ++k) {
    worst = std::max(worst,
                     (traj.norms[k] - traj.norms[k - 1]) /
                         std::max(traj.norms[k - 1], 1e-300));
  }
  add(checks, "Crank-Nicolson norms nonincreasing", worst <= 1e-12,
      "worst relative increase " + num(worst));

  double previous = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::string margins;
  for (const Index n : {50, 100, 200}) {
    WaveHeatSpec fine = spec;
    fine.grid1.n_nodes = n;
    fine.grid2.n_nodes = n;
    const WaveHeatSystem refined = wave_heat_build(fine);
    const double margin = hyperbolic_min_decay(
        eig(refined.a_s.a_restricted).report.eigenvalues);
    decreasing = decreasing && margin > 0.0 && margin < previous;
    previous = margin;
    if (!margins.empty()) margins += ", ";
    margins += "n=" + std::to_string(n) + ": " + num(margin);
  }
  add(checks, "oscillatory decay margin closes under refinement", decreasing,
      margins);
}

void case_coupled_heat(std::vector<CaseCheck>& checks) {
  CoupledParabolicSpec converging;
  converging.n_components = 2;
  converging.grid = {0.0, 1.0, 41};
  ComplexMatrix damping = ComplexMatrix::Zero(2, 2);
  damping(1, 1) = -1.0;
  converging.potential = {{0.0, 1.0, damping}};
  const VConditionVerdict verdict = check_v_condition(converging);
  add(checks, "partial damping satisfies the potential condition",
      verdict.holds, verdict.holds ? "no common oscillation" : "violated");
  const SimulationComparison run = simulate_and_compare(converging, 6.0, 0.004);
  add(checks, "semigroup reaches the predicted projection",
      run.converging && run.expm_distance && *run.expm_distance <= 1e-4,
      run.expm_distance ? "exp(TC) distance " + num(*run.expm_distance)
                        : "no comparison");

  CoupledParabolicSpec oscillating = converging;
  ComplexMatrix rotation(2, 2);
  rotation << 0, 1, -1, 0;
  oscillating.potential = {{0.0, 1.0, rotation}};
  const SimulationComparison spin = simulate_and_compare(oscillating, 20.0, 0.01);
  add(checks, "rotation potential oscillates at constant norm",
      !spin.converging && spin.probe_norm_drift <= 1e-10,
      "norm drift " + num(spin.probe_norm_drift));
}

void case_coupled_biharmonic(std::vector<CaseCheck>& checks) {
  CoupledParabolicSpec spec;
  spec.n_components = 2;
  spec.grid = {0.0, 1.0, 31};
  spec.kind = CoupledKind::Biharmonic;
  ComplexMatrix damping = ComplexMatrix::Zero(2, 2);
  damping(1, 1) = -1.0;
  spec.potential = {{0.0, 1.0, damping}};
  const VConditionVerdict verdict = check_v_condition(spec);
  add(checks, "partial damping satisfies the potential condition",
      verdict.holds, verdict.holds ? "no common oscillation" : "violated");
  const SimulationComparison run = simulate_and_compare(spec, 6.0, 0.004);
  add(checks, "fourth-order semigroup reaches the same projection",
      run.converging && run.expm_distance && *run.expm_distance <= 1e-4,
      run.expm_distance ? "exp(TC) distance " + num(*run.expm_distance)
                        : "no comparison");
}

const std::map<std::string, std::pair<CaseRunner, double>>& case_table() {
  static const std::map<std::string, std::pair<CaseRunner, double>> table = {
      {"turing", {case_turing, 1.0}},
      {"sector-diag", {case_sector_diag, 10.0}},
      {"heat-nonlocal", {case_heat_nonlocal, 30.0}},
      {"heat-dirichlet", {case_heat_dirichlet, 10.0}},
      {"heat-robin", {case_heat_robin, 30.0}},
      {"wave-heat", {case_wave_heat, 60.0}},
      {"coupled-heat", {case_coupled_heat, 60.0}},
      {"coupled-biharmonic", {case_coupled_biharmonic, 60.0}},
  };
  return table;
}

}  // namespace

int run_reproduce(const std::string& case_name, const std::string& output) {
  const auto& table = case_table();
  const auto it = table.find(case_name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [name, runner] : table) {
      if (!known.empty()) known += ", ";
      known += name;
    }
    throw ConfigError("case", "unknown case '" + case_name + "' (known: " +
                                  known + ")");
  }

  std::vector<CaseCheck> checks;
  const auto start = std::chrono::steady_clock::now();
  it->second.first(checks);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  checks.push_back({"runtime budget", elapsed < it->second.second,
                    num(elapsed) + " s of " + num(it->second.second) + " s"});

  std::ostringstream out;
  out << "case: " << case_name << '\n';
  bool all_pass = true;
  for (const CaseCheck& check : checks) {
    all_pass = all_pass && check.pass;
    out << "  " << (check.pass ? "ok  " : "FAIL") << ' ' << check.name << " ("
        << check.detail << ")\n";
  }
  out << (all_pass ? "PASS " : "FAIL ") << case_name << '\n';
  write_text(output, out.str());
  return all_pass ? 0 : 2;
}

}  // namespace specstab::cli
