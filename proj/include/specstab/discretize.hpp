// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "specstab/numkernel.hpp"

namespace specstab {

/// Uniform 1D grid on [a, b] with n_nodes nodes (n_nodes - 1 cells).
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  Index n_nodes = 0;

  double h() const { return (b - a) / static_cast<double>(n_nodes - 1); }
  double node(Index i) const { return a + static_cast<double>(i) * h(); }
  double cell_midpoint(Index i) const {
    return a + (static_cast<double>(i) + 0.5) * h();
  }
};

void validate(const Grid1D& grid, Index min_nodes = 3);

/// Second-order summation-by-parts first derivative: centered interior
/// rows, one-sided boundary rows, trapezoid norm matrix
/// W = h diag(1/2, 1, ..., 1, 1/2). The grid scale is chosen as a matched
/// floating-point pair so that W D + D^T W = en en^T - e0 e0^T holds with
/// residual exactly zero whenever such a pair exists near h (always, in
/// practice); sbp_residual records the achieved Frobenius defect.
struct SBPOperator {
  Grid1D grid;
  ComplexMatrix d;
  WeightedSpace space = WeightedSpace::identity(0);  // trapezoid weight
  ComplexVector e0;
  ComplexVector en;
  double sbp_residual = 0.0;
};

SBPOperator sbp_first_derivative(const Grid1D& grid);

/// Trapezoid node weight and constant cell weight of a grid, built from the
/// same matched scale as the SBP operators so discrete adjoint relations
/// stay sharp.
WeightedSpace trapezoid_space(const Grid1D& grid);
WeightedSpace cell_space(const Grid1D& grid);

/// Forward difference mapping node values to cell slopes, with the node and
/// cell weights that make its weighted adjoint the discrete negative
/// divergence (Neumann structure). The kernel is exactly the constants.
struct StaggeredPair {
  Grid1D grid;
  ComplexMatrix d_plus;  // (n_nodes - 1) x n_nodes
  WeightedSpace w_nodes = WeightedSpace::identity(0);
  WeightedSpace w_cells = WeightedSpace::identity(0);
};

StaggeredPair staggered_gradient(const Grid1D& grid);

/// Galerkin restriction of a_free onto ker(constraints): k_basis is a
/// W-orthonormal basis of the constraint kernel and
/// a_restricted = k_basis^* W a_free k_basis acts on identity-weighted
/// subspace coordinates. Quadratic forms restrict exactly, so
/// dissipativity statements transfer from the free operator.
struct ConstrainedOperator {
  ComplexMatrix a_free;
  ComplexMatrix constraints;  // k x n, full row rank
  WeightedSpace space = WeightedSpace::identity(0);
  ComplexMatrix k_basis;      // n x (n - k)
  ComplexMatrix a_restricted;

  /// Subspace coordinates -> free coordinates (x = K y).
  ComplexVector embed(const ComplexVector& y) const { return k_basis * y; }
  /// W-orthogonal coordinates of a free vector (y = K^* W x).
  ComplexVector coordinates(const ComplexVector& x) const {
    return k_basis.adjoint() * space.apply_weight(x);
  }
};

ConstrainedOperator restrict_operator(const ComplexMatrix& a_free,
                                      const ComplexMatrix& constraints,
                                      const WeightedSpace& space);

enum class SampleLocation { Nodes, Cells };

using ScalarCoefficient = std::function<Complex(double)>;

/// Piecewise-constant coefficient: values[k] holds on [breakpoints[k-1],
/// breakpoints[k]) with the outermost pieces extending to the domain ends.
struct PiecewiseConstant {
  std::vector<double> breakpoints;  // strictly ascending interior jumps
  std::vector<Complex> values;      // breakpoints.size() + 1 entries

  Complex at(double zeta) const;
};

void validate(const PiecewiseConstant& coeff);

/// Diagonal multiplication operator holding the coefficient samples at the
/// nodes or cell midpoints of the grid.
ComplexMatrix sample_coefficient(const ScalarCoefficient& f, const Grid1D& grid,
                                 SampleLocation location);
ComplexMatrix sample_coefficient(const PiecewiseConstant& coeff, const Grid1D& grid,
                                 SampleLocation location);

using MatrixCoefficient = std::function<ComplexMatrix(double)>;

/// Multiplication operator of an r x r matrix coefficient in component-major
/// layout (all samples of field 1, then field 2, ...): block (i, j) is the
/// diagonal of f(.)(i, j) over the sample points.
ComplexMatrix sample_matrix_coefficient(const MatrixCoefficient& f, Index r,
                                        const Grid1D& grid, SampleLocation location);

}  // namespace specstab
