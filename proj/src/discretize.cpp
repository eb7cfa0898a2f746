// SPDX-License-Identifier: Apache-2.0
#include "specstab/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace specstab {

namespace {

double step_ulps(double x, int k) {
  const double dir = k >= 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
  for (int i = 0; i < std::abs(k); ++i) x = std::nextafter(x, dir);
  return x;
}

struct ScalePair {
  double w;  // quadrature scale, within ulps of h
  double q;  // derivative scale, within ulps of 1/h
};

// Searches for (w, q) near (h, 1/h) with fl(w * q) == 1. With such a pair
// every entry of W D + D^T W - (en en^T - e0 e0^T) evaluates to exactly
// zero, because all remaining factors are powers of two. Falls back to the
// unmatched pair (residual then sits at rounding level, far below the
// documented bound).
ScalePair matched_scales(double h) {
  for (int dq : {0, 1, -1, 2, -2}) {
    const double q = step_ulps(1.0 / h, dq);
    if (!(q > 0.0) || !std::isfinite(q)) continue;
    const double w0 = 1.0 / q;
    for (int dw = 0; dw <= 32; ++dw) {
      for (const int sign : {1, -1}) {
        if (dw == 0 && sign < 0) continue;
        const double w = step_ulps(w0, sign * dw);
        if (w > 0.0 && w * q == 1.0) return {w, q};
      }
    }
  }
  return {h, 1.0 / h};
}

RealVector trapezoid_diagonal(Index n, double w) {
  RealVector diag = RealVector::Constant(n, w);
  diag(0) = 0.5 * w;
  diag(n - 1) = 0.5 * w;
  return diag;
}

}  // namespace

void validate(const Grid1D& grid, Index min_nodes) {
  if (!std::isfinite(grid.a) || !std::isfinite(grid.b) || grid.a >= grid.b) {
    throw InvalidInput("Grid1D: need finite endpoints with a < b");
  }
  if (grid.n_nodes < min_nodes) {
    throw InvalidInput("Grid1D: need at least " + std::to_string(min_nodes) +
                       " nodes, got " + std::to_string(grid.n_nodes));
  }
  if (grid.n_nodes > kMaxDenseDim) {
    throw InvalidInput("Grid1D: node count exceeds the dense-solver limit");
  }
}

SBPOperator sbp_first_derivative(const Grid1D& grid) {
  validate(grid, 3);
  const Index n = grid.n_nodes;
  const auto scale = matched_scales(grid.h());

  SBPOperator op;
  op.grid = grid;
  op.d = ComplexMatrix::Zero(n, n);
  op.d(0, 0) = -scale.q;
  op.d(0, 1) = scale.q;
  for (Index i = 1; i + 1 < n; ++i) {
    op.d(i, i - 1) = -0.5 * scale.q;
    op.d(i, i + 1) = 0.5 * scale.q;
  }
  op.d(n - 1, n - 2) = -scale.q;
  op.d(n - 1, n - 1) = scale.q;

  op.space = WeightedSpace::from_diagonal(trapezoid_diagonal(n, scale.w));
  op.e0 = ComplexVector::Unit(n, 0);
  op.en = ComplexVector::Unit(n, n - 1);

  // Measure the defect W D + D^* W - (e_n e_n^* - e_0 e_0^*) in one pass;
  // the weight is diagonal so no dense temporaries are needed.
  const RealVector& w = op.space.diagonal();
  double acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Complex v = w(i) * op.d(i, j) + std::conj(w(j) * op.d(j, i));
      if (i == n - 1 && j == n - 1) v -= 1.0;
      if (i == 0 && j == 0) v += 1.0;
      acc += std::norm(v);
    }
  }
  op.sbp_residual = std::sqrt(acc);
  return op;
}

WeightedSpace trapezoid_space(const Grid1D& grid) {
  validate(grid, 2);
  return WeightedSpace::from_diagonal(
      trapezoid_diagonal(grid.n_nodes, matched_scales(grid.h()).w));
}

WeightedSpace cell_space(const Grid1D& grid) {
  validate(grid, 2);
  return WeightedSpace::from_diagonal(
      RealVector::Constant(grid.n_nodes - 1, matched_scales(grid.h()).w));
}

StaggeredPair staggered_gradient(const Grid1D& grid) {
  validate(grid, 2);
  const Index n = grid.n_nodes;
  const auto scale = matched_scales(grid.h());

  StaggeredPair pair;
  pair.grid = grid;
  pair.d_plus = ComplexMatrix::Zero(n - 1, n);
  for (Index i = 0; i < n - 1; ++i) {
    pair.d_plus(i, i) = -scale.q;
    pair.d_plus(i, i + 1) = scale.q;
  }
  pair.w_nodes = WeightedSpace::from_diagonal(trapezoid_diagonal(n, scale.w));
  pair.w_cells =
      WeightedSpace::from_diagonal(RealVector::Constant(n - 1, scale.w));
  return pair;
}

ConstrainedOperator restrict_operator(const ComplexMatrix& a_free,
                                      const ComplexMatrix& constraints,
                                      const WeightedSpace& space) {
  require_square(a_free, "restrict_operator.a_free");
  require_finite(a_free, "restrict_operator.a_free");
  const Index n = a_free.rows();
  if (space.dim() != n) {
    throw InvalidInput("restrict_operator: space dimension mismatch");
  }
  if (constraints.size() > 0 && constraints.cols() != n) {
    throw InvalidInput("restrict_operator: constraint row length mismatch");
  }
  require_finite(constraints, "restrict_operator.constraints");

  const Index k = constraints.rows();
  if (k > 0 && matrix_rank(constraints) < k) {
    throw InvalidInput("restrict_operator: constraints are rank-deficient");
  }

  ComplexMatrix kernel;
  if (k == 0) {
    kernel = ComplexMatrix::Identity(n, n);
  } else {
    kernel = null_space(constraints);
  }
  if (kernel.cols() == 0) {
    throw InvalidInput("restrict_operator: constraints eliminate every state");
  }

  ConstrainedOperator out;
  out.a_free = a_free;
  out.constraints = constraints;
  out.space = space;
  out.k_basis = w_orthonormalize(kernel, space);
  if (out.k_basis.cols() != kernel.cols()) {
    throw NumericalFailure("restrict_operator: kernel basis lost rank");
  }
  out.a_restricted =
      out.k_basis.adjoint() * space.apply_weight(a_free * out.k_basis);
  return out;
}

Complex PiecewiseConstant::at(double zeta) const {
  std::size_t idx = 0;
  while (idx < breakpoints.size() && zeta >= breakpoints[idx]) ++idx;
  return values[idx];
}

void validate(const PiecewiseConstant& coeff) {
  if (coeff.values.size() != coeff.breakpoints.size() + 1) {
    throw InvalidInput(
        "PiecewiseConstant: need exactly one more value than breakpoints");
  }
  for (std::size_t i = 0; i < coeff.breakpoints.size(); ++i) {
    if (!std::isfinite(coeff.breakpoints[i])) {
      throw InvalidInput("PiecewiseConstant: nonfinite breakpoint");
    }
    if (i > 0 && !(coeff.breakpoints[i] > coeff.breakpoints[i - 1])) {
      throw InvalidInput("PiecewiseConstant: breakpoints must be strictly ascending");
    }
  }
  for (const Complex& v : coeff.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidInput("PiecewiseConstant: nonfinite value");
    }
  }
}

namespace {

ComplexMatrix sample_impl(const ScalarCoefficient& f, const Grid1D& grid,
                          SampleLocation location) {
  validate(grid, 2);
  if (!f) throw InvalidInput("sample_coefficient: missing coefficient");
  const Index m =
      location == SampleLocation::Nodes ? grid.n_nodes : grid.n_nodes - 1;
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    const double zeta = location == SampleLocation::Nodes ? grid.node(i)
                                                          : grid.cell_midpoint(i);
    const Complex v = f(zeta);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidInput("sample_coefficient: coefficient is not finite at " +
                         std::to_string(zeta));
    }
    out(i, i) = v;
  }
  return out;
}

}  // namespace

ComplexMatrix sample_coefficient(const ScalarCoefficient& f, const Grid1D& grid,
                                 SampleLocation location) {
  return sample_impl(f, grid, location);
}

ComplexMatrix sample_coefficient(const PiecewiseConstant& coeff, const Grid1D& grid,
                                 SampleLocation location) {
  validate(coeff);
  return sample_impl([&coeff](double zeta) { return coeff.at(zeta); }, grid,
                     location);
}

ComplexMatrix sample_matrix_coefficient(const MatrixCoefficient& f, Index r,
                                        const Grid1D& grid, SampleLocation location) {
  validate(grid, 2);
  if (!f) throw InvalidInput("sample_matrix_coefficient: missing coefficient");
  if (r < 1) throw InvalidInput("sample_matrix_coefficient: need r >= 1");
  const Index m =
      location == SampleLocation::Nodes ? grid.n_nodes : grid.n_nodes - 1;
  ComplexMatrix out = ComplexMatrix::Zero(r * m, r * m);
  for (Index p = 0; p < m; ++p) {
    const double zeta = location == SampleLocation::Nodes ? grid.node(p)
                                                          : grid.cell_midpoint(p);
    const ComplexMatrix block = f(zeta);
    if (block.rows() != r || block.cols() != r) {
      throw InvalidInput("sample_matrix_coefficient: coefficient block is not r x r");
    }
    require_finite(block, "sample_matrix_coefficient.block");
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < r; ++j) {
        out(i * m + p, j * m + p) = block(i, j);
      }
    }
  }
  return out;
}

}  // namespace specstab
