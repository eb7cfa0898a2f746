// SPDX-License-Identifier: Apache-2.0
#include "specstab/phs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "specstab/numkernel.hpp"

namespace specstab {

namespace {

MatrixCoefficient coefficient_or_identity(const MatrixCoefficient& f, Index dim) {
  if (f) return f;
  return [dim](double) { return ComplexMatrix::Identity(dim, dim); };
}

/// Kronecker product small (x) big in component-major layout: component
/// index varies slowest, node index fastest.
ComplexMatrix kron(const ComplexMatrix& small, const ComplexMatrix& big) {
  const Index p = small.rows();
  const Index q = small.cols();
  const Index m = big.rows();
  const Index k = big.cols();
  ComplexMatrix out = ComplexMatrix::Zero(p * m, q * k);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < q; ++j) {
      if (small(i, j) == Complex(0.0)) continue;
      out.block(i * m, j * k, m, k) = small(i, j) * big;
    }
  }
  return out;
}

void check_port_matrices(const PHSystemSpec& spec) {
  if (spec.n < 1 || spec.r < 1) {
    throw InvalidInput("ph spec: need n >= 1 state and r >= 1 dissipation "
                       "components");
  }
  require_shape(spec.p0, spec.n, spec.n, "p0");
  require_shape(spec.p1, spec.n, spec.n, "p1");
  require_shape(spec.g0, spec.n, spec.r, "g0");
  require_shape(spec.g1, spec.n, spec.r, "g1");
  require_finite(spec.p0, "p0");
  require_finite(spec.p1, "p1");
  require_finite(spec.g0, "g0");
  require_finite(spec.g1, "g1");
  if ((spec.p1 - spec.p1.adjoint()).norm() > 1e-13 * (1.0 + spec.p1.norm())) {
    throw InvalidInput("ph spec: p1 must be self-adjoint");
  }
  if ((spec.p0 + spec.p0.adjoint()).norm() > 1e-13 * (1.0 + spec.p0.norm())) {
    throw InvalidInput("ph spec: p0 must be skew-adjoint");
  }
}

void check_structure_matrices(const PHSystemSpec& spec) {
  check_port_matrices(spec);
  const Index m = spec.n + spec.r;
  require_shape(spec.tilde_wb, m, 2 * m, "tilde_wb");
  require_finite(spec.tilde_wb, "tilde_wb");
  if (matrix_rank(spec.tilde_wb) != m) {
    throw InvalidInput("ph spec: tilde_wb must have full row rank");
  }
}

double sampled_hermitian_floor(const MatrixCoefficient& f, Index dim,
                               const Grid1D& grid, const char* what) {
  double floor = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < grid.n_nodes; ++a) {
    const ComplexMatrix block = f(grid.node(a));
    require_shape(block, dim, dim, what);
    require_finite(block, what);
    const ComplexMatrix herm = 0.5 * (block + block.adjoint());
    if ((block - herm).norm() > 1e-13 * (1.0 + block.norm())) {
      throw InvalidInput(std::string(what) + ": sample is not Hermitian");
    }
    floor = std::min(
        floor,
        hermitian_pencil_eig(herm, WeightedSpace::identity(dim)).values(0));
  }
  return floor;
}

double sampled_real_part_floor(const MatrixCoefficient& f, Index dim,
                               const Grid1D& grid, const char* what) {
  double floor = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < grid.n_nodes; ++a) {
    const ComplexMatrix block = f(grid.node(a));
    require_shape(block, dim, dim, what);
    require_finite(block, what);
    const ComplexMatrix herm = 0.5 * (block + block.adjoint());
    floor = std::min(
        floor,
        hermitian_pencil_eig(herm, WeightedSpace::identity(dim)).values(0));
  }
  return floor;
}

void require_unit_interval(const Grid1D& grid, const char* what) {
  if (grid.a != 0.0 || grid.b != 1.0) {
    throw InvalidInput(std::string(what) + ": grid must cover (0, 1)");
  }
}

bool p1ext_is_invertible(const ComplexMatrix& p1ext) {
  return smallest_singular_value(p1ext) >
         1e-10 * (1.0 + operator_norm(p1ext));
}

ComplexMatrix sigma_swap(Index m) {
  ComplexMatrix sigma = ComplexMatrix::Zero(2 * m, 2 * m);
  sigma.block(0, m, m, m) = ComplexMatrix::Identity(m, m);
  sigma.block(m, 0, m, m) = ComplexMatrix::Identity(m, m);
  return sigma;
}

void require_heat_wb(const ComplexMatrix& tilde_wb) {
  require_shape(tilde_wb, 2, 4, "tilde_wb");
  require_finite(tilde_wb, "tilde_wb");
  if (matrix_rank(tilde_wb) != 2) {
    throw InvalidInput("heat boundary matrix must have rank 2");
  }
}

struct RestrictedForm {
  bool nonpositive = false;
  bool null_included = false;
  double best_c = 0.0;
};

/// Decides Q1 <= -c Q2 for some c > 0 on the span of the identity, with
/// both forms Hermitian and Q2 positive semidefinite: Q1 must be negative
/// semidefinite and its null directions must be annihilated by Q2.
RestrictedForm negative_domination(const ComplexMatrix& q1,
                                   const ComplexMatrix& q2) {
  RestrictedForm out;
  const Index k = q1.rows();
  const double scale = 1.0 + q1.norm() + q2.norm();
  const double tol = 1e-12 * scale;
  const auto dec =
      hermitian_pencil_eig(q1, WeightedSpace::identity(k), true);
  out.nonpositive = dec.values.size() == 0 || dec.values.maxCoeff() <= tol;
  out.null_included = true;
  for (Index i = 0; i < dec.values.size(); ++i) {
    if (std::abs(dec.values(i)) > tol) continue;
    if ((q2 * dec.vectors.col(i)).norm() > 1e-10 * scale) {
      out.null_included = false;
    }
  }
  out.best_c = largest_negative_shift(q1, q2);
  return out;
}

}  // namespace

PHSpecBounds validate(const PHSystemSpec& spec) {
  check_structure_matrices(spec);
  validate(spec.grid, 3);
  require_unit_interval(spec.grid, "ph spec");
  PHSpecBounds bounds;
  bounds.hamiltonian_floor = sampled_hermitian_floor(
      coefficient_or_identity(spec.hamiltonian, spec.n), spec.n, spec.grid,
      "hamiltonian");
  bounds.coercivity = sampled_real_part_floor(
      coefficient_or_identity(spec.s, spec.r), spec.r, spec.grid, "s");
  if (!(bounds.hamiltonian_floor > 0.0)) {
    throw InvalidInput("ph spec: hamiltonian loses uniform positivity");
  }
  if (!(bounds.coercivity > 0.0)) {
    throw InvalidInput("ph spec: Re S loses coercivity");
  }
  return bounds;
}

PExtPair assemble_p_ext(const PHSystemSpec& spec) {
  check_port_matrices(spec);
  const Index n = spec.n;
  const Index r = spec.r;
  PExtPair out;
  out.p1ext = ComplexMatrix::Zero(n + r, n + r);
  out.p1ext.block(0, 0, n, n) = spec.p1;
  out.p1ext.block(0, n, n, r) = spec.g1;
  out.p1ext.block(n, 0, r, n) = spec.g1.adjoint();
  out.p0ext = ComplexMatrix::Zero(n + r, n + r);
  out.p0ext.block(0, 0, n, n) = spec.p0;
  out.p0ext.block(0, n, n, r) = spec.g0;
  out.p0ext.block(n, 0, r, n) = -spec.g0.adjoint();
  if ((out.p1ext - out.p1ext.adjoint()).norm() >
          1e-13 * (1.0 + out.p1ext.norm()) ||
      (out.p0ext + out.p0ext.adjoint()).norm() >
          1e-13 * (1.0 + out.p0ext.norm())) {
    throw NumericalFailure("extended port matrices lost their symmetry");
  }
  return out;
}

ComplexMatrix compute_w_b(const ComplexMatrix& tilde_wb,
                          const ComplexMatrix& p1ext) {
  require_square(p1ext, "p1ext");
  require_finite(p1ext, "p1ext");
  const Index m = p1ext.rows();
  require_shape(tilde_wb, m, 2 * m, "tilde_wb");
  require_finite(tilde_wb, "tilde_wb");
  if (!p1ext_is_invertible(p1ext)) {
    throw InvalidInput("compute_w_b: the extended port matrix is singular; "
                       "the generation criterion requires it invertible");
  }
  const ComplexMatrix pinv =
      p1ext.partialPivLu().solve(ComplexMatrix::Identity(m, m));
  ComplexMatrix inverse(2 * m, 2 * m);
  inverse.block(0, 0, m, m) = 0.5 * pinv;
  inverse.block(0, m, m, m) = 0.5 * ComplexMatrix::Identity(m, m);
  inverse.block(m, 0, m, m) = -0.5 * pinv;
  inverse.block(m, m, m, m) = 0.5 * ComplexMatrix::Identity(m, m);
  return std::sqrt(2.0) * tilde_wb * inverse;
}

GenerationCheck generation_check(const ComplexMatrix& wb) {
  require_finite(wb, "wb");
  const Index m = wb.rows();
  if (m < 1 || wb.cols() != 2 * m) {
    throw InvalidInput("generation_check: wb must be m x 2m");
  }
  ComplexMatrix product = wb * sigma_swap(m) * wb.adjoint();
  product = 0.5 * (product + product.adjoint()).eval();
  GenerationCheck out;
  out.min_eigenvalue =
      hermitian_pencil_eig(product, WeightedSpace::identity(m)).values(0);
  out.psd = out.min_eigenvalue >= -1e-12 * (1.0 + product.norm());
  return out;
}

HeatSigmaReport heat_bc_sigma_matrix(const ComplexMatrix& tilde_wb) {
  require_heat_wb(tilde_wb);
  ComplexMatrix sigma(2, 2);
  sigma << 0.0, 1.0, 1.0, 0.0;
  const ComplexMatrix wb1 = tilde_wb.block(0, 0, 2, 2);
  const ComplexMatrix wb0 = tilde_wb.block(0, 2, 2, 2);
  HeatSigmaReport out;
  out.matrix = wb1 * sigma * wb1.adjoint() - wb0 * sigma * wb0.adjoint();
  const ComplexMatrix herm = 0.5 * (out.matrix + out.matrix.adjoint());
  const double min_eig =
      hermitian_pencil_eig(herm, WeightedSpace::identity(2)).values(0);
  const double tol = 1e-12 * (1.0 + out.matrix.norm());
  out.psd = min_eig >= -tol;
  out.pd = min_eig > tol;
  return out;
}

HeatConditionReport heat_stability_conditions(const ComplexMatrix& tilde_wb) {
  require_heat_wb(tilde_wb);
  const ComplexMatrix kernel = null_space(tilde_wb);
  if (kernel.cols() != 2) {
    throw NumericalFailure("rank-2 heat boundary matrix must have a "
                           "2-dimensional kernel");
  }
  // Boundary form Re(b1* b2 - b3* b4) and the two endpoint blocks.
  ComplexMatrix m1 = ComplexMatrix::Zero(4, 4);
  m1(0, 1) = 0.5;
  m1(1, 0) = 0.5;
  m1(2, 3) = -0.5;
  m1(3, 2) = -0.5;
  ComplexMatrix m2_right = ComplexMatrix::Zero(4, 4);
  m2_right(0, 0) = 1.0;
  m2_right(1, 1) = 1.0;
  ComplexMatrix m2_left = ComplexMatrix::Zero(4, 4);
  m2_left(2, 2) = 1.0;
  m2_left(3, 3) = 1.0;

  const auto restrict_form = [&](const ComplexMatrix& form) {
    ComplexMatrix q = kernel.adjoint() * form * kernel;
    return (0.5 * (q + q.adjoint())).eval();
  };
  const ComplexMatrix q1 = restrict_form(m1);

  HeatConditionReport out;
  const RestrictedForm right = negative_domination(q1, restrict_form(m2_right));
  out.cond1 = right.nonpositive && right.null_included;
  out.c1 = right.best_c;
  const RestrictedForm left = negative_domination(q1, restrict_form(m2_left));
  out.cond2 = left.nonpositive && left.null_included;
  out.c2 = left.best_c;
  out.cond3 = heat_bc_sigma_matrix(tilde_wb).pd;
  return out;
}

BoundaryCheckReport boundary_report(const PHSystemSpec& spec) {
  check_structure_matrices(spec);
  const PExtPair pext = assemble_p_ext(spec);
  BoundaryCheckReport out;
  out.p1ext_invertible = p1ext_is_invertible(pext.p1ext);
  if (out.p1ext_invertible) {
    out.wb = compute_w_b(spec.tilde_wb, pext.p1ext);
    const GenerationCheck gen = generation_check(out.wb);
    out.generation_psd = gen.psd;
    out.generation_min_eigenvalue = gen.min_eigenvalue;
  }
  out.g1_rank_n = matrix_rank(spec.g1) == spec.n;
  if (spec.n == 1 && spec.r == 1) {
    BoundaryCheckReport::HeatPart heat;
    heat.conditions = heat_stability_conditions(spec.tilde_wb);
    heat.sigma = heat_bc_sigma_matrix(spec.tilde_wb);
    out.heat_conditions = heat;
  }
  return out;
}

PHDiscretization discretize_L(const PHSystemSpec& spec) {
  validate(spec);
  const PExtPair pext = assemble_p_ext(spec);
  if (!p1ext_is_invertible(pext.p1ext)) {
    throw InvalidInput("discretize_L: the extended port matrix is singular; "
                       "the matched extended operator needs it invertible");
  }

  const Index n = spec.n;
  const Index r = spec.r;
  const Index nn = spec.grid.n_nodes;
  const auto op = sbp_first_derivative(spec.grid);
  const ComplexMatrix eye_nodes = ComplexMatrix::Identity(nn, nn);
  const ComplexMatrix h_op = sample_matrix_coefficient(
      coefficient_or_identity(spec.hamiltonian, n), n, spec.grid,
      SampleLocation::Nodes);
  const ComplexMatrix s_op = sample_matrix_coefficient(
      coefficient_or_identity(spec.s, r), r, spec.grid, SampleLocation::Nodes);

  PHDiscretization out;
  out.split.a11 = (kron(spec.p1, op.d) + kron(spec.p0, eye_nodes)) * h_op;
  out.split.a12 = kron(spec.g1, op.d) + kron(spec.g0, eye_nodes);
  out.split.a21 =
      (kron(spec.g1.adjoint(), op.d) - kron(spec.g0.adjoint(), eye_nodes)) *
      h_op;
  out.split.s = s_op;

  // State weight (1/2) w_a H(zeta_a) per node; H commutes with the node
  // scaling, so the product below is Hermitian up to roundoff.
  const RealVector& w = op.space.diagonal();
  ComplexMatrix weight = h_op;
  for (Index j = 0; j < n; ++j) {
    for (Index b = 0; b < nn; ++b) {
      weight.col(j * nn + b) *= 0.5 * w(b);
    }
  }
  weight = 0.5 * (weight + weight.adjoint()).eval();
  out.split.space1 = WeightedSpace::from_weight(weight);
  RealVector p_diag(r * nn);
  for (Index j = 0; j < r; ++j) {
    p_diag.segment(j * nn, nn) = 0.5 * w;
  }
  out.split.space2 = WeightedSpace::from_diagonal(p_diag);
  out.ext_space = direct_sum(out.split.space1, out.split.space2);

  const ComplexMatrix a_s_free = assemble_a_s(out.split);
  const ComplexMatrix a_ext_free = assemble_a_ext(out.split);

  // Trace (Hx(1); x_p(1); Hx(0); x_p(0)). The closed variant reconstructs
  // x_p = S (G1* d - G0*) H x discretely, which keeps the closure identity
  // exact between the two restricted operators.
  const Index m = n + r;
  out.trace_ext = ComplexMatrix::Zero(2 * m, m * nn);
  out.trace_closed = ComplexMatrix::Zero(2 * m, n * nn);
  const ComplexMatrix reconstructed = s_op * out.split.a21;
  for (int side = 0; side < 2; ++side) {
    const Index node = (side == 0) ? nn - 1 : 0;
    const Index row0 = side * m;
    for (Index i = 0; i < n; ++i) {
      out.trace_ext.block(row0 + i, 0, 1, n * nn) = h_op.row(i * nn + node);
      out.trace_closed.row(row0 + i) = h_op.row(i * nn + node);
    }
    for (Index j = 0; j < r; ++j) {
      out.trace_ext(row0 + n + j, n * nn + j * nn + node) = 1.0;
      out.trace_closed.row(row0 + n + j) = reconstructed.row(j * nn + node);
    }
  }

  out.a_s = restrict_operator(a_s_free, spec.tilde_wb * out.trace_closed,
                              out.split.space1);
  out.a_ext = restrict_operator(a_ext_free, spec.tilde_wb * out.trace_ext,
                                out.ext_space);
  return out;
}

PHDiscretization heat_general_bc(const ComplexMatrix& tilde_wb,
                                 const ScalarCoefficient& s,
                                 const Grid1D& grid) {
  if (!s) throw InvalidInput("heat_general_bc: missing diffusion coefficient");
  PHSystemSpec spec;
  spec.n = 1;
  spec.r = 1;
  spec.p0 = ComplexMatrix::Zero(1, 1);
  spec.p1 = ComplexMatrix::Zero(1, 1);
  spec.g0 = ComplexMatrix::Zero(1, 1);
  spec.g1 = ComplexMatrix::Identity(1, 1);
  spec.s = [s](double zeta) {
    ComplexMatrix value(1, 1);
    value(0, 0) = s(zeta);
    return value;
  };
  spec.tilde_wb = tilde_wb;
  spec.grid = grid;
  return discretize_L(spec);
}

void validate(const WaveHeatSpec& spec) {
  validate(spec.grid1, 3);
  validate(spec.grid2, 3);
  if (spec.grid1.a != 0.0 || spec.grid1.b != 1.0) {
    throw InvalidInput("wave-heat: the wave subinterval must be (0, 1)");
  }
  if (spec.grid2.a != 1.0 || spec.grid2.b != 2.0) {
    throw InvalidInput("wave-heat: the heat subinterval must be (1, 2)");
  }
  if (!spec.s) throw InvalidInput("wave-heat: missing diffusion coefficient");
  for (Index i = 0; i < spec.grid2.n_nodes; ++i) {
    const Complex value = spec.s(spec.grid2.node(i));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
        !(value.real() > 0.0)) {
      throw InvalidInput("wave-heat: Re S must stay positive");
    }
  }
}

WaveHeatSystem wave_heat_build(const WaveHeatSpec& spec) {
  validate(spec);
  const auto op1 = sbp_first_derivative(spec.grid1);
  const auto op2 = sbp_first_derivative(spec.grid2);
  const Index n1 = spec.grid1.n_nodes;
  const Index n2 = spec.grid2.n_nodes;
  const Index dim1 = 2 * n1 + n2;  // v1, v2, w1

  WaveHeatSystem out;
  out.split.a11 = ComplexMatrix::Zero(dim1, dim1);
  out.split.a11.block(0, n1, n1, n1) = op1.d;
  out.split.a11.block(n1, 0, n1, n1) = op1.d;
  out.split.a12 = ComplexMatrix::Zero(dim1, n2);
  out.split.a12.block(2 * n1, 0, n2, n2) = op2.d;
  out.split.a21 = ComplexMatrix::Zero(n2, dim1);
  out.split.a21.block(0, 2 * n1, n2, n2) = op2.d;
  out.split.s = sample_coefficient(spec.s, spec.grid2, SampleLocation::Nodes);
  out.split.space1 =
      direct_sum(direct_sum(op1.space, op1.space), op2.space);
  out.split.space2 = op2.space;
  out.ext_space = direct_sum(out.split.space1, out.split.space2);

  const ComplexMatrix a_s_free = assemble_a_s(out.split);
  const ComplexMatrix a_ext_free = assemble_a_ext(out.split);

  // Shared rows: v1(0) = 0, w1(2) = 0, v1(1) = w1(1).
  ComplexMatrix shared = ComplexMatrix::Zero(3, dim1);
  shared(0, 0) = 1.0;
  shared(1, 2 * n1 + n2 - 1) = 1.0;
  shared(2, n1 - 1) = 1.0;
  shared(2, 2 * n1) = -1.0;

  ComplexMatrix constraints_s = ComplexMatrix::Zero(4, dim1);
  constraints_s.block(0, 0, 3, dim1) = shared;
  constraints_s(3, 2 * n1 - 1) = 1.0;  // v2(1)
  constraints_s.block(3, 2 * n1, 1, n2) =
      -(out.split.s * op2.d).row(0);  // (S d w1) at the interface

  ComplexMatrix constraints_ext = ComplexMatrix::Zero(4, dim1 + n2);
  constraints_ext.block(0, 0, 3, dim1) = shared;
  constraints_ext(3, 2 * n1 - 1) = 1.0;  // v2(1)
  constraints_ext(3, dim1) = -1.0;       // w2(1)

  out.a_s = restrict_operator(a_s_free, constraints_s, out.split.space1);
  out.a_ext = restrict_operator(a_ext_free, constraints_ext, out.ext_space);
  return out;
}

double hyperbolic_min_decay(const std::vector<Complex>& eigenvalues,
                            double im_threshold) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex lambda : eigenvalues) {
    if (std::abs(lambda.imag()) >= im_threshold) {
      best = std::min(best, std::abs(lambda.real()));
    }
  }
  return best;
}

}  // namespace specstab
