// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specstab/numkernel.hpp"

namespace specstab {

/// Stability classes, decided by the table in assess_stability.
enum class StabilityClass {
  StrictlyDissipative,
  ExponentiallyStable,
  StronglyStableProbePassed,
  Marginal,
  Unstable,
};

const char* to_string(StabilityClass c);

struct StabilityVerdict {
  double abscissa = 0.0;      // numerical abscissa in the W geometry
  double growth_bound = 0.0;  // max Re eigenvalue
  double strict_margin = 0.0; // max(0, -abscissa)
  std::vector<Complex> peripheral_eigs;
  double resolvent_sup = 0.0; // sup over the scan grid, 0 when no grid given
  bool resolvent_unbounded = false;
  StabilityClass classification = StabilityClass::Marginal;
};

struct AssessOptions {
  /// Peripheral band |Re lambda| <= re_tol. Default 1e-8 * ||A||_2.
  std::optional<double> re_tol;
  /// Decision threshold of the classification table.
  /// Default 1e-10 * (1 + ||A||_2).
  std::optional<double> class_tol;
  /// Frequencies for an optional weighted resolvent scan.
  std::vector<double> resolvent_grid;
  /// Set by refinement sweeps that watched the spectral gap close under
  /// grid refinement; upgrades exponentially-stable to the probe class.
  bool strong_stability_probe = false;
};

/// Computes spectrum, abscissa and (optionally) a resolvent scan, then
/// classifies. Decision table, evaluated top to bottom with tol = class_tol:
///   1. growth_bound >  tol                      -> unstable
///   2. abscissa    <= -tol                      -> strictly-dissipative
///   3. peripheral eigenvalues present           -> marginal
///   4. growth_bound <= -tol and probe flag set  -> strongly-stable-probe-passed
///   5. growth_bound <= -tol                     -> exponentially-stable
///   6. otherwise                                -> marginal
StabilityVerdict assess_stability(const ComplexMatrix& a, const WeightedSpace& space,
                                  const AssessOptions& opts = {});

struct PeripheralMode {
  Complex lambda;
  ComplexVector vector;  // unit 2-norm right eigenvector
};

/// Eigenpairs with |Re lambda| <= re_tol. Eigenvector residuals are checked
/// against 1e-10 * (||A||_F + |lambda|); a miss raises NumericalFailure.
std::vector<PeripheralMode> peripheral_point_spectrum(const ComplexMatrix& a,
                                                      double re_tol);

/// Maps a peripheral eigenvector v of the closed operator to the extended
/// witness (v; S A21 v).
using PairBuilder = std::function<ComplexVector(const ComplexVector&)>;

PairBuilder split_pair_builder(const ComplexMatrix& a21, const ComplexMatrix& s);

struct InclusionWitness {
  Complex lambda;
  ComplexVector witness;
  double residual = 0.0;
  bool ok = false;
};

struct InclusionVerdict {
  bool ok = true;  // vacuously true without peripheral eigenvalues
  std::vector<InclusionWitness> witnesses;
};

/// For every peripheral eigenpair (i omega, v) of a_s, certifies that the
/// lifted witness z = lift(v) satisfies ||(i omega I - a_ext) z|| <= tol ||z||,
/// i.e. the eigenvalue transfers to the extended operator. Violations are
/// reported per eigenvalue.
InclusionVerdict check_peripheral_inclusion(const ComplexMatrix& a_s,
                                            const ComplexMatrix& a_ext,
                                            const PairBuilder& lift, double tol,
                                            std::optional<double> re_tol = {});

/// Orthonormal basis of ker a21 intersected with ker(i omega I - a11),
/// computed as the null space of the stacked matrix. The overload with a
/// space returns a W-orthonormal basis.
ComplexMatrix kernel_intersection(const ComplexMatrix& a21, const ComplexMatrix& a11,
                                  double omega, double tol = kRankTol);
ComplexMatrix kernel_intersection(const ComplexMatrix& a21, const ComplexMatrix& a11,
                                  double omega, double tol, const WeightedSpace& space);

/// max(0, -numerical_abscissa): the sharp strict-dissipativity margin.
double strict_dissipativity_margin(const ComplexMatrix& a, const WeightedSpace& space);

/// Largest eps >= 0 with (W A + A^* W)/2 <= -eps * blockdiag(W1, 0), where
/// W1 is the leading n1 x n1 block of the product weight: the partial
/// strict-dissipativity margin in the first component. Requires the weight
/// to be block-diagonal against the split at n1.
double thm39_condition1_margin(const ComplexMatrix& a_ext, const WeightedSpace& product,
                               Index n1);

/// nu * c^2 with nu the coercivity constant of s on space2 and c the
/// bounded-below constant of a21 between the weighted spaces (zero when
/// a21 has a nontrivial kernel). Predicts abscissa(A_S) <= -nu c^2 for
/// dissipative extended operators.
double thm39_condition2_bound(const ComplexMatrix& a21, const ComplexMatrix& s,
                              const WeightedSpace& space1, const WeightedSpace& space2);

struct ResolventSample {
  double omega = 0.0;
  double norm = 0.0;  // +inf on singular points
  bool singular = false;
};

/// ||(i omega I - A)^{-1}|| along the grid: 2-norm without a space, W-norm
/// with one. Grid points hitting the spectrum are flagged, not thrown.
/// Parallel over grid points; the _serial twins are the reference
/// implementation and produce identical output.
std::vector<ResolventSample> resolvent_norm_scan(const ComplexMatrix& a,
                                                 const std::vector<double>& omega_grid);
std::vector<ResolventSample> resolvent_norm_scan(const ComplexMatrix& a,
                                                 const WeightedSpace& space,
                                                 const std::vector<double>& omega_grid);
std::vector<ResolventSample> resolvent_norm_scan_serial(const ComplexMatrix& a,
                                                        const std::vector<double>& omega_grid);
std::vector<ResolventSample> resolvent_norm_scan_serial(const ComplexMatrix& a,
                                                        const WeightedSpace& space,
                                                        const std::vector<double>& omega_grid);

/// Support points of the W-numerical range by angle sweep: for each theta,
/// the top eigenvector v of the Hermitian part of e^{i theta} A (in the W
/// pencil sense) contributes the boundary point <A v, v>_W. Parallel over
/// angles, with a serial reference twin.
std::vector<Complex> numerical_range_boundary(const ComplexMatrix& a,
                                              const WeightedSpace& space, Index angles);
std::vector<Complex> numerical_range_boundary_serial(const ComplexMatrix& a,
                                                     const WeightedSpace& space,
                                                     Index angles);

/// True iff e^{tA} is entrywise nonnegative to within tol (real parts
/// >= -tol, imaginary parts <= tol in magnitude) for every listed t > 0.
bool positivity_probe(const ComplexMatrix& a, const std::vector<double>& t_list,
                      double tol);

/// For W-dissipative A: the W-orthogonal projection P onto ker A when 0 is
/// the only eigenvalue with Re >= -gap_tol (then e^{tA} -> P); nullopt when
/// a nonzero peripheral eigenvalue blocks convergence. A defective zero
/// eigenvalue raises NumericalFailure (impossible for dissipative A).
std::optional<ComplexMatrix> limit_projection(const ComplexMatrix& a,
                                              const WeightedSpace& space,
                                              double gap_tol);

enum class Scheme { CrankNicolson, BackwardEuler, Expm };

std::optional<Scheme> parse_scheme(const std::string& name);
const char* to_string(Scheme s);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;  // weighted norms, one per time
  ComplexVector final_state;
};

/// Fixed-step propagation of x' = Ax recording weighted norms. The step is
/// adjusted to the nearest divisor of t_end so the final time is hit
/// exactly. Crank-Nicolson preserves W-contractivity of dissipative A.
Trajectory propagate(const ComplexMatrix& a, const WeightedSpace& space,
                     const ComplexVector& x0, double t_end, double dt, Scheme scheme);

/// Least-squares slope of log ||x(t)|| over the trailing window fraction
/// of the trajectory. Norms in the window must be positive.
double decay_rate_fit(const Trajectory& traj, double window);

}  // namespace specstab
