// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "specstab/closure.hpp"
#include "specstab/discretize.hpp"
#include "specstab/types.hpp"

namespace specstab {

// Second-order dissipative port-Hamiltonian systems on (0, 1):
//
//   d/dt x = (P_1 d + P_0 + (G_1 d + G_0) S (G_1^* d - G_0^*)) (H x)
//
// with boundary conditions tilde_wb * (Hx(1); x_p(1); Hx(0); x_p(0)) = 0,
// where x_p = S (G_1^* d - G_0^*) H x is the dissipation variable. The
// module assembles matched discretizations of the closed operator and of
// the extended first-order operator, plus the boundary-matrix algebra that
// decides contraction semigroup generation and exponential stability.

struct PHSystemSpec {
  Index n = 0;  // state components
  Index r = 0;  // dissipation components
  ComplexMatrix p0;  // n x n skew-adjoint
  ComplexMatrix p1;  // n x n self-adjoint
  ComplexMatrix g0;  // n x r
  ComplexMatrix g1;  // n x r
  /// n x n Hermitian, uniformly positive definite; empty means identity.
  MatrixCoefficient hamiltonian;
  /// r x r with coercive real part; empty means identity.
  MatrixCoefficient s;
  ComplexMatrix tilde_wb;  // (n+r) x 2(n+r), full row rank
  Grid1D grid;             // must be (0, 1)
};

struct PHSpecBounds {
  double hamiltonian_floor = 0.0;  // largest m with H >= m I at all samples
  double coercivity = 0.0;         // largest nu with Re S >= nu I
};

/// Shape and structure checks; returns the sampled lower bounds. Throws
/// InvalidInput when P_1 is not self-adjoint, P_0 not skew-adjoint (both at
/// 1e-13 relative), H or Re S loses positivity at a sample, or tilde_wb is
/// rank deficient.
PHSpecBounds validate(const PHSystemSpec& spec);

struct PExtPair {
  ComplexMatrix p1ext;  // [[P1, G1], [G1*, 0]], self-adjoint
  ComplexMatrix p0ext;  // [[P0, G0], [-G0*, 0]], skew-adjoint
};

PExtPair assemble_p_ext(const PHSystemSpec& spec);

/// W_B = sqrt(2) * tilde_wb * [[P, -P], [I, I]]^{-1} through the closed-form
/// block inverse. Throws InvalidInput when p1ext is singular, which is the
/// hypothesis the generation criterion needs.
ComplexMatrix compute_w_b(const ComplexMatrix& tilde_wb,
                          const ComplexMatrix& p1ext);

struct GenerationCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Contraction criterion: W_B [[0, I], [I, 0]] W_B^* positive semidefinite.
GenerationCheck generation_check(const ComplexMatrix& wb);

struct HeatSigmaReport {
  ComplexMatrix matrix;  // Wb1 sigma Wb1^* - Wb0 sigma Wb0^*, sigma = [[0,1],[1,0]]
  bool psd = false;
  bool pd = false;
};

/// Heat-case (n = r = 1) boundary quadratic form on the 2x4 matrix
/// tilde_wb = [Wb1 | Wb0]. Requires rank 2.
HeatSigmaReport heat_bc_sigma_matrix(const ComplexMatrix& tilde_wb);

struct HeatConditionReport {
  bool cond1 = false;  // Re(b1* b2 - b3* b4) <= -c (|b1|^2 + |b2|^2) on ker
  double c1 = 0.0;     // best such c (may be +inf when unconstrained)
  bool cond2 = false;  // same with the left-endpoint block |b3|^2 + |b4|^2
  double c2 = 0.0;
  bool cond3 = false;  // the sigma matrix is positive definite
};

/// Exponential-stability conditions for the heat case, decided exactly on
/// the two-dimensional kernel of tilde_wb: the boundary form must be
/// negative semidefinite there and its null directions must be annihilated
/// by the endpoint block. The best constant is a generalized eigenvalue.
HeatConditionReport heat_stability_conditions(const ComplexMatrix& tilde_wb);

struct BoundaryCheckReport {
  bool p1ext_invertible = false;
  ComplexMatrix wb;  // empty when p1ext is singular
  bool generation_psd = false;
  double generation_min_eigenvalue = 0.0;
  bool g1_rank_n = false;
  struct HeatPart {
    HeatConditionReport conditions;
    HeatSigmaReport sigma;
  };
  std::optional<HeatPart> heat_conditions;  // present only when n = r = 1
};

BoundaryCheckReport boundary_report(const PHSystemSpec& spec);

/// Matched discretizations. Component-major layout: component i of x (or of
/// x_p) occupies one contiguous block of nodal values. The state weight is
/// (1/2) trapezoid x H(node); the weight of the dissipation field and the
/// extended state append (1/2) trapezoid x I_r blocks.
struct PHDiscretization {
  SplitClosureSystem split;    // free interior operators (no boundary rows)
  ConstrainedOperator a_s;     // closed operator, boundary conditions applied
  ConstrainedOperator a_ext;   // extended operator, boundary conditions applied
  ComplexMatrix trace_ext;     // (x; x_p) -> (Hx(1); x_p(1); Hx(0); x_p(0))
  ComplexMatrix trace_closed;  // x -> same vector with x_p reconstructed
  WeightedSpace ext_space = WeightedSpace::identity(0);
};

PHDiscretization discretize_L(const PHSystemSpec& spec);

/// The heat specialization n = r = 1, P1 = P0 = G0 = 0, G1 = 1, H = 1.
PHDiscretization heat_general_bc(const ComplexMatrix& tilde_wb,
                                 const ScalarCoefficient& s, const Grid1D& grid);

/// Wave equation on (0, 1) coupled at the interface to a heat equation on
/// (1, 2). The diffusion coefficient lives on the second subinterval.
struct WaveHeatSpec {
  Grid1D grid1{0.0, 1.0, 0};
  Grid1D grid2{1.0, 2.0, 0};
  ScalarCoefficient s;
};

void validate(const WaveHeatSpec& spec);

/// Discrete wave-heat pair. State order for the closed operator: wave
/// velocity v1, wave strain v2 (both on grid1), heat state w1 (on grid2);
/// the extended operator appends the dissipation field w2 on grid2.
/// Closed constraints: v1(0) = 0, w1(2) = 0, v1(1) = w1(1),
/// v2(1) = (S d w1)(1) through the one-sided derivative row. Extended
/// constraints replace the last one by v2(1) = w2(1).
struct WaveHeatSystem {
  SplitClosureSystem split;
  ConstrainedOperator a_s;
  ConstrainedOperator a_ext;
  WeightedSpace ext_space = WeightedSpace::identity(0);
};

WaveHeatSystem wave_heat_build(const WaveHeatSpec& spec);

/// Smallest |Re lambda| among eigenvalues with |Im lambda| >= im_threshold
/// (the oscillatory branch); +infinity when no eigenvalue qualifies.
double hyperbolic_min_decay(const std::vector<Complex>& eigenvalues,
                            double im_threshold = 0.5);

}  // namespace specstab
