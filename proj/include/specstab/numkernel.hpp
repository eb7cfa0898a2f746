// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "specstab/types.hpp"

namespace specstab {

/// Finite-dimensional Hilbert space C^n carrying the inner product
/// <x,y>_W = y^* W x for a Hermitian positive definite weight W.
/// Diagonal and identity weights are recognized and handled without
/// factorization so large quadrature weights stay cheap and exact.
class WeightedSpace {
 public:
  static WeightedSpace identity(Index dim);
  static WeightedSpace from_diagonal(const RealVector& diag);
  static WeightedSpace from_weight(const ComplexMatrix& weight);

  Index dim() const { return dim_; }
  bool is_identity() const { return kind_ == Kind::Identity; }
  bool is_diagonal() const { return kind_ != Kind::General; }

  /// Dense weight matrix (materialized on demand for diagonal spaces).
  ComplexMatrix weight() const;
  const RealVector& diagonal() const;  // only for diagonal spaces

  Complex inner(const ComplexVector& x, const ComplexVector& y) const;
  double norm(const ComplexVector& x) const;

  /// Applies W, W^{-1}, the lower Cholesky factor L (W = L L^*), L^*, and
  /// their inverses to a matrix of column vectors.
  ComplexMatrix apply_weight(const ComplexMatrix& x) const;
  ComplexMatrix solve_weight(const ComplexMatrix& x) const;
  ComplexMatrix apply_factor(const ComplexMatrix& x) const;        // L x
  ComplexMatrix apply_factor_adjoint(const ComplexMatrix& x) const;  // L^* x
  ComplexMatrix solve_factor(const ComplexMatrix& x) const;        // L^{-1} x
  ComplexMatrix solve_factor_adjoint(const ComplexMatrix& x) const;  // L^{-*} x

 private:
  enum class Kind { Identity, Diagonal, General };
  WeightedSpace() = default;

  Kind kind_ = Kind::Identity;
  Index dim_ = 0;
  RealVector diag_;        // diagonal weights (Diagonal kind)
  RealVector diag_sqrt_;   // element-wise sqrt of diag_
  ComplexMatrix weight_;   // dense weight (General kind)
  ComplexMatrix chol_l_;   // lower Cholesky factor (General kind)
};

/// Weight of the direct sum of two spaces: block-diag(W_a, W_b). Identity
/// and diagonal structure is preserved when both summands have it.
WeightedSpace direct_sum(const WeightedSpace& a, const WeightedSpace& b);

/// Eigenvalue summary. Eigenvalues are sorted by descending real part
/// (ties by ascending imaginary part); peripheral collects the indices of
/// eigenvalues with |Re lambda| <= re_tol.
struct SpectralReport {
  std::vector<Complex> eigenvalues;
  double max_real_part = 0.0;
  double re_tol = 0.0;
  std::vector<Index> peripheral;

  bool has_peripheral() const { return !peripheral.empty(); }
};

struct EigenDecomposition {
  SpectralReport report;
  /// Right eigenvectors as columns (unit 2-norm), ordered like the report.
  ComplexMatrix vectors;
};

/// Dense eigendecomposition via complex Schur reduction. If re_tol is not
/// given it defaults to 1e-8 * ||A||_2. Throws NumericalFailure if the QR
/// iteration does not converge.
EigenDecomposition eig(const ComplexMatrix& a, std::optional<double> re_tol = {});

/// Orthonormal (standard inner product) basis of ker A. Singular values
/// below rel_tol * sigma_max count as zero; rank + returned columns = cols(A).
ComplexMatrix null_space(const ComplexMatrix& a, double rel_tol = kRankTol);

Index matrix_rank(const ComplexMatrix& a, double rel_tol = kRankTol);

/// The unique B with <Ax, y>_codom = <x, By>_dom, i.e. W_dom^{-1} A^* W_codom.
ComplexMatrix weighted_adjoint(const ComplexMatrix& a, const WeightedSpace& dom,
                               const WeightedSpace& codom);

/// sup_{h != 0} Re<Ah,h>_W / <h,h>_W = largest eigenvalue of the Hermitian
/// pencil ((WA + A^*W)/2, W). A is W-dissipative iff the result is <= 0.
double numerical_abscissa(const ComplexMatrix& a, const WeightedSpace& space);

/// Largest principal angle between span(U) and span(V) in the W geometry,
/// in [0, pi/2]. Columns need not be orthonormal (they are orthonormalized
/// internally). Spans of different dimensions are never equal; pi/2 is
/// returned in that case.
double principal_angle(const ComplexMatrix& u, const ComplexMatrix& v,
                       const WeightedSpace& space);

/// Matrix exponential e^A (scaling-and-squaring with Pade approximation).
ComplexMatrix expm(const ComplexMatrix& a);

double operator_norm(const ComplexMatrix& a);  // largest singular value
double smallest_singular_value(const ComplexMatrix& a);
RealVector singular_values(const ComplexMatrix& a);  // descending

/// W-orthonormalizes the columns of v by modified Gram-Schmidt with one
/// reorthogonalization pass; columns whose remainder drops below
/// drop_tol * (largest input W-norm) are discarded.
ComplexMatrix w_orthonormalize(const ComplexMatrix& v, const WeightedSpace& space,
                               double drop_tol = kRankTol);

/// Eigenvalues (ascending) of the Hermitian pencil (m, W), reduced to a
/// standard Hermitian problem through the Cholesky factor of W. Vectors,
/// when requested, are W-orthonormal.
struct PencilEigs {
  RealVector values;
  ComplexMatrix vectors;
};
PencilEigs hermitian_pencil_eig(const ComplexMatrix& m, const WeightedSpace& space,
                                bool with_vectors = false);

/// Largest eps >= 0 with m + eps*b negative semidefinite, for Hermitian
/// m and b with b positive semidefinite. Returns 0 when m itself fails
/// m <= 0 beyond roundoff, and +infinity when every shift stays feasible
/// (b acts only where m is unreachable). Solved by bisection on the
/// largest eigenvalue of m + eps*b, which is nondecreasing in eps.
double largest_negative_shift(const ComplexMatrix& m, const ComplexMatrix& b);

/// W-orthogonal projection B B^* W onto the span of a W-orthonormal basis.
ComplexMatrix w_projection(const ComplexMatrix& w_orthonormal_basis,
                           const WeightedSpace& space);

}  // namespace specstab
