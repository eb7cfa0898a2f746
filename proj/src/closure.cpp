// SPDX-License-Identifier: Apache-2.0
#include "specstab/closure.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace specstab {

namespace {

void validate_shapes(const SplitClosureSystem& sys) {
  const Index n1 = sys.space1.dim();
  const Index n2 = sys.space2.dim();
  require_shape(sys.a11, n1, n1, "a11");
  require_shape(sys.a12, n1, n2, "a12");
  require_shape(sys.a21, n2, n1, "a21");
  require_shape(sys.s, n2, n2, "s");
  require_finite(sys.a11, "a11");
  require_finite(sys.a12, "a12");
  require_finite(sys.a21, "a21");
  require_finite(sys.s, "s");
}

}  // namespace

void validate(const SplitClosureSystem& sys) {
  validate_shapes(sys);
  if (!(coercivity_constant(sys.s, sys.space2) > 0.0)) {
    throw InvalidInput("SplitClosureSystem: S is not coercive on H2");
  }
}

double coercivity_constant(const ComplexMatrix& s, const WeightedSpace& space) {
  require_square(s, "coercivity_constant.S");
  require_finite(s, "coercivity_constant.S");
  if (s.rows() != space.dim()) {
    throw InvalidInput("coercivity_constant: S is " + std::to_string(s.rows()) +
                       "x" + std::to_string(s.cols()) + " but the space has dim " +
                       std::to_string(space.dim()));
  }
  if (s.rows() == 0) return 0.0;
  const ComplexMatrix ws = space.apply_weight(s);
  const ComplexMatrix herm = 0.5 * (ws + ws.adjoint());
  return hermitian_pencil_eig(herm, space).values(0);
}

ComplexMatrix assemble_a_ext(const SplitClosureSystem& sys) {
  validate_shapes(sys);
  const Index n1 = sys.space1.dim();
  const Index n2 = sys.space2.dim();
  ComplexMatrix ext = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  ext.topLeftCorner(n1, n1) = sys.a11;
  ext.topRightCorner(n1, n2) = sys.a12;
  ext.bottomLeftCorner(n2, n1) = sys.a21;
  return ext;
}

WeightedSpace product_space(const SplitClosureSystem& sys) {
  return direct_sum(sys.space1, sys.space2);
}

ComplexMatrix assemble_a_s(const SplitClosureSystem& sys) {
  validate_shapes(sys);
  const ComplexMatrix lift = sys.a12 * sys.s;
  return sys.a11 + lift * sys.a21;
}

PairingCheck check_skew_pairing(const SplitClosureSystem& sys, double tol) {
  validate_shapes(sys);
  if (!(tol > 0.0)) throw InvalidInput("check_skew_pairing: tol must be positive");
  const ComplexMatrix lhs = sys.space1.apply_weight(sys.a12);
  const ComplexMatrix rhs = sys.space2.apply_weight(sys.a21).adjoint();
  const double denom = lhs.norm() + rhs.norm() + std::numeric_limits<double>::epsilon();
  PairingCheck out;
  out.residual = (lhs + rhs).norm() / denom;
  out.ok = out.residual <= tol;
  return out;
}

double closure_identity_residual(const SplitClosureSystem& sys,
                                 const ComplexVector& h1) {
  return closure_identity_residual(assemble_a_ext(sys), assemble_a_s(sys),
                                   sys.a21, sys.s, h1);
}

double closure_identity_residual(const ComplexMatrix& a_ext,
                                 const ComplexMatrix& a_s,
                                 const ComplexMatrix& a21,
                                 const ComplexMatrix& s,
                                 const ComplexVector& h1) {
  require_square(a_ext, "closure_identity.a_ext");
  require_square(a_s, "closure_identity.a_s");
  require_square(s, "closure_identity.s");
  const Index n1 = a_s.rows();
  const Index n2 = s.rows();
  require_shape(a21, n2, n1, "closure_identity.a21");
  if (a_ext.rows() != n1 + n2) {
    throw InvalidInput("closure_identity: a_ext must act on the product space");
  }
  if (h1.size() != n1) {
    throw InvalidInput("closure_identity: h1 has dim " + std::to_string(h1.size()) +
                       ", expected " + std::to_string(n1));
  }
  const double nrm = h1.norm();
  if (!(nrm > 0.0)) throw InvalidInput("closure_identity: h1 must be nonzero");

  const ComplexVector a21h = a21 * h1;
  ComplexVector lifted(n1 + n2);
  lifted.head(n1) = h1;
  lifted.tail(n2) = s * a21h;
  ComplexVector expected(n1 + n2);
  expected.head(n1) = a_s * h1;
  expected.tail(n2) = a21h;
  return (a_ext * lifted - expected).norm() / nrm;
}

double form_residual(const SplitClosureSystem& sys, const ComplexVector& u,
                     const ComplexVector& v) {
  const PairingCheck pairing = check_skew_pairing(sys);
  if (!pairing.ok) {
    throw InvalidInput("form_residual: skew pairing violated (residual " +
                       std::to_string(pairing.residual) + ")");
  }
  const Index n1 = sys.space1.dim();
  if (u.size() != n1 || v.size() != n1) {
    throw InvalidInput("form_residual: u, v must live on H1");
  }
  const ComplexVector a21u = sys.a21 * u;
  const ComplexVector a21v = sys.a21 * v;
  const Complex form = sys.space2.inner(sys.s * a21u, a21v) -
                       sys.space1.inner(sys.a11 * u, v);
  const Complex closed = sys.space1.inner(-(assemble_a_s(sys) * u), v);
  return std::abs(closed - form);
}

StructureVerdict check_structure(const SplitClosureSystem& sys, double tol) {
  validate_shapes(sys);
  if (!(tol > 0.0)) throw InvalidInput("check_structure: tol must be positive");

  StructureVerdict verdict;
  verdict.coercivity = coercivity_constant(sys.s, sys.space2);
  verdict.s_coercive = verdict.coercivity > 0.0;

  const PairingCheck pairing = check_skew_pairing(sys, tol);
  verdict.pairing_residual = pairing.residual;
  verdict.skew_pairing = pairing.ok;

  verdict.a11_abscissa = numerical_abscissa(sys.a11, sys.space1);
  verdict.a11_dissipative = verdict.a11_abscissa <= tol * (1.0 + sys.a11.norm());

  const ComplexMatrix ext = assemble_a_ext(sys);
  verdict.a_ext_abscissa = numerical_abscissa(ext, product_space(sys));
  verdict.a_ext_dissipative = verdict.a_ext_abscissa <= tol * (1.0 + ext.norm());
  return verdict;
}

}  // namespace specstab
