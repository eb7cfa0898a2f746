// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace specstab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an argument violates a documented precondition
/// (wrong shape, non-finite entries, missing structure, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative kernel fails to converge or a numerical
/// sanity check breaks down. Failures are always reported, never swallowed.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default relative cutoff for rank decisions: singular values below
/// rank_tol * sigma_max count as zero.
inline constexpr double kRankTol = 1e-10;

/// All dense kernels are designed for moderate problem sizes; refuse
/// anything beyond this dimension instead of silently grinding.
inline constexpr Index kMaxDenseDim = 3000;

void require_finite(const ComplexMatrix& a, const char* name);
void require_square(const ComplexMatrix& a, const char* name);
void require_shape(const ComplexMatrix& a, Index rows, Index cols, const char* name);

}  // namespace specstab
