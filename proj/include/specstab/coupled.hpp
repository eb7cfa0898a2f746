// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "specstab/closure.hpp"
#include "specstab/discretize.hpp"
#include "specstab/types.hpp"

namespace specstab {

// Systems of N parabolic components on an interval, coupled pointwise by a
// piecewise-constant matrix potential. The component equations are either
// second order (divergence-form diffusion with Neumann conditions) or fourth
// order (a biharmonic operator built from the Neumann Laplacian). The long
// time behaviour is decided by the joint kernel structure of the potential
// pieces, which this module checks and cross-validates against simulation.

enum class CoupledKind { Heat, Biharmonic };

/// One piece of the piecewise-constant potential: the matrix v acts on the
/// component vector at every node whose coordinate falls in [lo, hi]. A node
/// sitting exactly on an interior interface is assigned to the piece on its
/// left, so the assignment is deterministic.
struct PotentialPiece {
  double lo = 0.0;
  double hi = 0.0;
  ComplexMatrix v;
};

struct CoupledParabolicSpec {
  Index n_components = 1;
  Grid1D grid;
  CoupledKind kind = CoupledKind::Heat;
  /// Per-component diffusion coefficients (heat: sampled on cells,
  /// biharmonic: sampled on nodes). Empty means every coefficient is 1.
  std::vector<ScalarCoefficient> coefficients;
  /// Pieces must partition [grid.a, grid.b] in ascending order.
  std::vector<PotentialPiece> potential;
};

void validate(const CoupledParabolicSpec& spec);

/// Index of the potential piece owning coordinate zeta (left piece wins on
/// interior interfaces).
std::size_t piece_index_at(const CoupledParabolicSpec& spec, double zeta);

/// The assembled coupled operator C = diag(A_1, ..., A_N) + V together with
/// the split it was closed from. Component-major layout: the state stacks
/// the nodal values of component 1, then component 2, and so on.
struct CoupledOperator {
  ComplexMatrix c;
  WeightedSpace space = WeightedSpace::identity(0);  // product node weight
  SplitClosureSystem split;  // a11 is the potential, a12 s a21 the diffusion

  const ComplexMatrix& a11_block() const { return split.a11; }
  const ComplexMatrix& a21_block() const { return split.a21; }
};

/// Assembles the coupled operator. Heat components discretize
/// div(S_k grad x_k) with the staggered gradient and its weighted adjoint;
/// biharmonic components use -Lap s_k Lap with the Neumann Laplacian.
/// Throws InvalidInput when a sampled coefficient has nonpositive real part
/// (ellipticity failure) or the spec is malformed.
CoupledOperator build_coupled_operator(const CoupledParabolicSpec& spec);

/// One flag per piece: is the piece matrix dissipative in the Euclidean
/// inner product (numerical abscissa <= tol * (1 + ||V_j||_F))?
std::vector<bool> check_v_dissipative(const CoupledParabolicSpec& spec,
                                      double tol = 1e-10);

struct VConditionVerdict {
  bool holds = false;
  std::optional<double> failing_beta;
  std::optional<ComplexVector> witness;  // common eigenvector when !holds
  std::vector<bool> per_piece_dissipative;
};

/// Decides whether the pieces share a purely imaginary nonzero eigenvalue
/// with a common eigenvector. Candidate frequencies come from the first
/// piece's spectrum: a common eigenvector is an eigenvector of every piece,
/// so the frequency must appear there. For each candidate the kernels of
/// (i beta - V_j) are intersected by one stacked null-space computation.
/// holds == true means no such common pair exists.
VConditionVerdict check_v_condition(const CoupledParabolicSpec& spec,
                                    double tol = 1e-10);

/// W-orthogonal projection onto the spatially constant functions whose
/// component vector lies in the kernel of every potential piece. Requires
/// check_v_condition to hold and every piece to be dissipative; these are
/// the hypotheses under which e^{tC} converges to this projection.
ComplexMatrix predict_limit_projection(const CoupledParabolicSpec& spec);

struct SimulationComparison {
  bool converging = false;
  double spectral_gap = 0.0;  // decay rate of the slowest damped mode
  double horizon = 0.0;       // time used for the operator-level comparison
  /// ||e^{horizon C} - P||_2, present in the converging case.
  std::optional<double> expm_distance;
  ComplexVector probe_state;  // initial state used for trajectory evidence
  std::vector<double> probe_times;
  std::vector<double> probe_distances;  // ||x(t) - P x0||_W at probe times
  double probe_norm_drift = 0.0;  // max relative drift of ||x(t)||_W
};

/// Converging case (potential condition holds, pieces dissipative): compares
/// e^{TC} against the predicted projection at T = 60 / gap and propagates a
/// smooth probe state. Otherwise: propagates the common-eigenvector probe,
/// whose distance from the projection stays bounded away from zero and whose
/// norm is constant up to time-stepping roundoff.
SimulationComparison simulate_and_compare(const CoupledParabolicSpec& spec,
                                          double t_end, double dt);

}  // namespace specstab
