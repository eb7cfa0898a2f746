// SPDX-License-Identifier: Apache-2.0
#include "specstab/numkernel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace specstab {

namespace {

void require_dense_scale(const ComplexMatrix& a, const char* name) {
  if (a.rows() > kMaxDenseDim || a.cols() > kMaxDenseDim) {
    throw InvalidInput(std::string(name) + ": dimension exceeds the dense-only scope (" +
                       std::to_string(kMaxDenseDim) + ")");
  }
}

void require_hermitian(const ComplexMatrix& a, const char* name, double rel_tol = 1e-12) {
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > rel_tol * std::max(scale, 1.0)) {
    throw InvalidInput(std::string(name) + ": matrix is not Hermitian");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// WeightedSpace

WeightedSpace WeightedSpace::identity(Index dim) {
  if (dim < 0) throw InvalidInput("WeightedSpace: negative dimension");
  WeightedSpace s;
  s.kind_ = Kind::Identity;
  s.dim_ = dim;
  s.diag_ = RealVector::Ones(dim);
  s.diag_sqrt_ = s.diag_;
  return s;
}

WeightedSpace WeightedSpace::from_diagonal(const RealVector& diag) {
  for (Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) {
      throw InvalidInput("WeightedSpace: diagonal weight entries must be positive and finite");
    }
  }
  WeightedSpace s;
  s.kind_ = Kind::Diagonal;
  s.dim_ = diag.size();
  s.diag_ = diag;
  s.diag_sqrt_ = diag.array().sqrt();
  return s;
}

WeightedSpace WeightedSpace::from_weight(const ComplexMatrix& weight) {
  require_square(weight, "WeightedSpace.weight");
  require_finite(weight, "WeightedSpace.weight");
  require_hermitian(weight, "WeightedSpace.weight");

  // Recognize diagonal weights so quadrature matrices take the cheap path.
  const Index n = weight.rows();
  bool diagonal = true;
  for (Index j = 0; j < n && diagonal; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i != j && weight(i, j) != Complex(0.0, 0.0)) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal) {
    bool is_id = true;
    RealVector d(n);
    for (Index i = 0; i < n; ++i) {
      d(i) = weight(i, i).real();
      if (d(i) != 1.0) is_id = false;
    }
    if (is_id) return identity(n);
    return from_diagonal(d);
  }

  WeightedSpace s;
  s.kind_ = Kind::General;
  s.dim_ = n;
  s.weight_ = 0.5 * (weight + weight.adjoint());
  Eigen::LLT<ComplexMatrix> llt(s.weight_);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("WeightedSpace: weight is not positive definite (Cholesky failed)");
  }
  s.chol_l_ = llt.matrixL();
  return s;
}

ComplexMatrix WeightedSpace::weight() const {
  switch (kind_) {
    case Kind::Identity:
      return ComplexMatrix::Identity(dim_, dim_);
    case Kind::Diagonal:
      return diag_.cast<Complex>().asDiagonal();
    case Kind::General:
      return weight_;
  }
  return {};
}

const RealVector& WeightedSpace::diagonal() const {
  if (kind_ == Kind::General) {
    throw InvalidInput("WeightedSpace: diagonal() called on a non-diagonal space");
  }
  return diag_;
}

Complex WeightedSpace::inner(const ComplexVector& x, const ComplexVector& y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw InvalidInput("WeightedSpace.inner: vector dimension mismatch");
  }
  switch (kind_) {
    case Kind::Identity:
      return y.dot(x);  // y^* x
    case Kind::Diagonal:
      return y.dot(diag_.asDiagonal() * x);
    case Kind::General:
      return y.dot(weight_ * x);
  }
  return {};
}

double WeightedSpace::norm(const ComplexVector& x) const {
  const double sq = inner(x, x).real();
  return std::sqrt(std::max(sq, 0.0));
}

ComplexMatrix WeightedSpace::apply_weight(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_.asDiagonal() * x;
    case Kind::General:
      return weight_ * x;
  }
  return {};
}

ComplexMatrix WeightedSpace::solve_weight(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_.cwiseInverse().asDiagonal() * x;
    case Kind::General: {
      ComplexMatrix y = chol_l_.triangularView<Eigen::Lower>().solve(x);
      return chol_l_.adjoint().triangularView<Eigen::Upper>().solve(y);
    }
  }
  return {};
}

ComplexMatrix WeightedSpace::apply_factor(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_sqrt_.asDiagonal() * x;
    case Kind::General:
      return chol_l_.triangularView<Eigen::Lower>() * x;
  }
  return {};
}

ComplexMatrix WeightedSpace::apply_factor_adjoint(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_sqrt_.asDiagonal() * x;
    case Kind::General:
      return chol_l_.adjoint().triangularView<Eigen::Upper>() * x;
  }
  return {};
}

ComplexMatrix WeightedSpace::solve_factor(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_sqrt_.cwiseInverse().asDiagonal() * x;
    case Kind::General:
      return chol_l_.triangularView<Eigen::Lower>().solve(x);
  }
  return {};
}

ComplexMatrix WeightedSpace::solve_factor_adjoint(const ComplexMatrix& x) const {
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return diag_sqrt_.cwiseInverse().asDiagonal() * x;
    case Kind::General:
      return chol_l_.adjoint().triangularView<Eigen::Upper>().solve(x);
  }
  return {};
}

WeightedSpace direct_sum(const WeightedSpace& a, const WeightedSpace& b) {
  const Index n = a.dim() + b.dim();
  if (a.is_identity() && b.is_identity()) return WeightedSpace::identity(n);
  if (a.is_diagonal() && b.is_diagonal()) {
    RealVector d(n);
    d.head(a.dim()) = a.diagonal();
    d.tail(b.dim()) = b.diagonal();
    return WeightedSpace::from_diagonal(d);
  }
  ComplexMatrix w = ComplexMatrix::Zero(n, n);
  w.topLeftCorner(a.dim(), a.dim()) = a.weight();
  w.bottomRightCorner(b.dim(), b.dim()) = b.weight();
  return WeightedSpace::from_weight(w);
}

// ---------------------------------------------------------------------------
// Singular values and norms

RealVector singular_values(const ComplexMatrix& a) {
  require_finite(a, "singular_values.a");
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  const RealVector sv = singular_values(a);
  return sv.size() > 0 ? sv(0) : 0.0;
}

/// Smallest of the min(rows, cols) singular values.
double smallest_singular_value(const ComplexMatrix& a) {
  const RealVector sv = singular_values(a);
  if (sv.size() == 0) return 0.0;
  return sv(sv.size() - 1);
}

// ---------------------------------------------------------------------------
// Eigendecomposition

EigenDecomposition eig(const ComplexMatrix& a, std::optional<double> re_tol) {
  require_square(a, "eig.A");
  require_finite(a, "eig.A");
  require_dense_scale(a, "eig.A");

  const Index n = a.rows();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eig: QR iteration failed to converge");
  }

  const double tol = re_tol ? *re_tol : 1e-8 * operator_norm(a);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&raw](Index i, Index j) {
    if (raw(i).real() != raw(j).real()) return raw(i).real() > raw(j).real();
    return raw(i).imag() < raw(j).imag();
  });

  EigenDecomposition out;
  out.report.eigenvalues.resize(static_cast<std::size_t>(n));
  out.report.re_tol = tol;
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Complex lambda = raw(order[static_cast<std::size_t>(k)]);
    out.report.eigenvalues[static_cast<std::size_t>(k)] = lambda;
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    const double nrm = out.vectors.col(k).norm();
    if (nrm > 0) out.vectors.col(k) /= nrm;
    if (std::abs(lambda.real()) <= tol) out.report.peripheral.push_back(k);
  }
  out.report.max_real_part =
      n > 0 ? out.report.eigenvalues.front().real() : -std::numeric_limits<double>::infinity();
  return out;
}

// ---------------------------------------------------------------------------
// Null spaces and rank

ComplexMatrix null_space(const ComplexMatrix& a, double rel_tol) {
  require_finite(a, "null_space.A");
  if (!(rel_tol > 0.0)) throw InvalidInput("null_space: tol must be positive");
  const Index n = a.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (a.rows() == 0) return ComplexMatrix::Identity(n, n);

  Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * smax) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Index matrix_rank(const ComplexMatrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  const RealVector sv = singular_values(a);
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * smax) ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Weighted adjoint

ComplexMatrix weighted_adjoint(const ComplexMatrix& a, const WeightedSpace& dom,
                               const WeightedSpace& codom) {
  require_finite(a, "weighted_adjoint.A");
  if (a.cols() != dom.dim() || a.rows() != codom.dim()) {
    throw InvalidInput("weighted_adjoint: A must map dom -> codom (" +
                       std::to_string(dom.dim()) + " -> " + std::to_string(codom.dim()) +
                       "), got " + std::to_string(a.cols()) + " -> " + std::to_string(a.rows()));
  }
  return dom.solve_weight(codom.apply_weight(a).adjoint());
}

// ---------------------------------------------------------------------------
// Hermitian pencils

PencilEigs hermitian_pencil_eig(const ComplexMatrix& m, const WeightedSpace& space,
                                bool with_vectors) {
  require_square(m, "hermitian_pencil_eig.m");
  require_finite(m, "hermitian_pencil_eig.m");
  if (m.rows() != space.dim()) {
    throw InvalidInput("hermitian_pencil_eig: matrix does not match the space dimension");
  }
  // Reduce (m, W) to the standard problem on L^{-1} m L^{-*}; the input is
  // symmetrized to absorb assembly roundoff.
  ComplexMatrix b = space.solve_factor(m);
  b = space.solve_factor(b.adjoint().eval()).adjoint();
  b = 0.5 * (b + b.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      b, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("hermitian_pencil_eig: eigensolver failed to converge");
  }
  PencilEigs out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = space.solve_factor_adjoint(solver.eigenvectors());
  return out;
}

double numerical_abscissa(const ComplexMatrix& a, const WeightedSpace& space) {
  require_square(a, "numerical_abscissa.A");
  require_finite(a, "numerical_abscissa.A");
  if (a.rows() != space.dim()) {
    throw InvalidInput("numerical_abscissa: matrix does not match the space dimension");
  }
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  const ComplexMatrix wa = space.apply_weight(a);
  const ComplexMatrix m = 0.5 * (wa + wa.adjoint());
  const PencilEigs eigs = hermitian_pencil_eig(m, space, false);
  return eigs.values(eigs.values.size() - 1);
}

// ---------------------------------------------------------------------------
// Orthonormalization and principal angles

ComplexMatrix w_orthonormalize(const ComplexMatrix& v, const WeightedSpace& space,
                               double drop_tol) {
  require_finite(v, "w_orthonormalize.v");
  if (v.rows() != space.dim()) {
    throw InvalidInput("w_orthonormalize: basis does not match the space dimension");
  }
  const Index n = v.rows();
  const Index k = v.cols();
  ComplexMatrix q(n, k);
  Index kept = 0;
  double scale = 0.0;
  for (Index j = 0; j < k; ++j) {
    scale = std::max(scale, space.norm(v.col(j)));
  }
  if (scale == 0.0) return ComplexMatrix(n, 0);
  for (Index j = 0; j < k; ++j) {
    ComplexVector x = v.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < kept; ++i) {
        x -= space.inner(x, q.col(i)) * q.col(i);
      }
    }
    const double nrm = space.norm(x);
    if (nrm > drop_tol * scale) {
      q.col(kept) = x / nrm;
      ++kept;
    }
  }
  return q.leftCols(kept);
}

double principal_angle(const ComplexMatrix& u, const ComplexMatrix& v,
                       const WeightedSpace& space) {
  require_finite(u, "principal_angle.U");
  require_finite(v, "principal_angle.V");
  const ComplexMatrix qu = w_orthonormalize(u, space);
  const ComplexMatrix qv = w_orthonormalize(v, space);
  if (qu.cols() != qv.cols()) return std::numbers::pi / 2.0;
  if (qu.cols() == 0) return 0.0;

  // Cosine route: singular values of U^{*W} V. Accurate for large angles but
  // quantized near theta = 0, so small angles switch to the sine route
  // sin(theta) = ||(I - P_U) V||_W, which resolves angles down to roundoff.
  const ComplexMatrix cross = qu.adjoint() * space.apply_weight(qv);
  const RealVector cos_sv = singular_values(cross);
  const double cmin = std::clamp(cos_sv(cos_sv.size() - 1), 0.0, 1.0);
  if (cmin * cmin < 0.5) return std::acos(cmin);

  const ComplexMatrix residual = qv - qu * cross;
  const double smax = std::clamp(operator_norm(space.apply_factor(residual)), 0.0, 1.0);
  return std::asin(smax);
}

ComplexMatrix w_projection(const ComplexMatrix& w_orthonormal_basis,
                           const WeightedSpace& space) {
  require_finite(w_orthonormal_basis, "w_projection.basis");
  if (w_orthonormal_basis.rows() != space.dim()) {
    throw InvalidInput("w_projection: basis does not match the space dimension");
  }
  return w_orthonormal_basis * space.apply_weight(w_orthonormal_basis).adjoint();
}

// ---------------------------------------------------------------------------
// Matrix exponential

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "expm.A");
  require_finite(a, "expm.A");
  require_dense_scale(a, "expm.A");
  return a.exp();
}

// ---------------------------------------------------------------------------
// Negative-shift margin

double largest_negative_shift(const ComplexMatrix& m, const ComplexMatrix& b) {
  require_square(m, "largest_negative_shift.m");
  require_square(b, "largest_negative_shift.b");
  require_finite(m, "largest_negative_shift.m");
  require_finite(b, "largest_negative_shift.b");
  if (m.rows() != b.rows()) {
    throw InvalidInput("largest_negative_shift: dimension mismatch");
  }
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();

  const ComplexMatrix mh = 0.5 * (m + m.adjoint());
  const ComplexMatrix bh = 0.5 * (b + b.adjoint());
  const double m_scale = std::max(mh.norm(), 1e-300);
  const double b_scale = bh.norm();

  const auto lambda_max = [](const ComplexMatrix& x) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(x, Eigen::EigenvaluesOnly);
    return s.eigenvalues()(x.rows() - 1);
  };
  const auto feasible = [&](double eps) {
    const ComplexMatrix shifted = mh + eps * bh;
    const double slack = 1e-12 * (m_scale + eps * b_scale);
    return lambda_max(shifted) <= slack;
  };

  if (!feasible(0.0)) return 0.0;
  if (b_scale == 0.0) return std::numeric_limits<double>::infinity();

  double lo = 0.0;
  double hi = m_scale / b_scale + 1.0;
  int doublings = 0;
  while (feasible(hi)) {
    hi *= 4.0;
    if (++doublings > 40) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 120 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace specstab
