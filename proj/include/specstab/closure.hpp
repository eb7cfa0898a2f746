// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "specstab/numkernel.hpp"

namespace specstab {

/// Split system: A11 on a weighted space H1, the coupling pair (A12, A21)
/// between H1 and H2, and a coercive factor S on H2. Collapsing the second
/// component through h2 = S A21 h1 turns the extended block operator into
/// the single-space operator A_S = A11 + A12 S A21.
struct SplitClosureSystem {
  ComplexMatrix a11;  // n1 x n1
  ComplexMatrix a12;  // n1 x n2
  ComplexMatrix a21;  // n2 x n1
  ComplexMatrix s;    // n2 x n2
  WeightedSpace space1 = WeightedSpace::identity(0);
  WeightedSpace space2 = WeightedSpace::identity(0);
};

/// Shape and finiteness checks plus the standing assumption that S is
/// coercive on H2. Throws InvalidInput on violation.
void validate(const SplitClosureSystem& sys);

struct PairingCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Hypothesis summary for a split system. Every flag sits next to the
/// number that justified it.
struct StructureVerdict {
  bool s_coercive = false;
  double coercivity = 0.0;  // largest admissible coercivity constant of S
  bool skew_pairing = false;
  double pairing_residual = 0.0;
  bool a11_dissipative = false;
  double a11_abscissa = 0.0;
  bool a_ext_dissipative = false;
  double a_ext_abscissa = 0.0;

  bool all_hypotheses() const {
    return s_coercive && skew_pairing && a11_dissipative && a_ext_dissipative;
  }
};

/// Largest nu with Re<h, S h>_W >= nu ||h||_W^2 for all h: the smallest
/// eigenvalue of the pencil ((WS + S^*W)/2, W). Positive iff S is coercive.
double coercivity_constant(const ComplexMatrix& s, const WeightedSpace& space);

/// Block operator [[A11, A12], [A21, 0]] on the product space H1 x H2.
ComplexMatrix assemble_a_ext(const SplitClosureSystem& sys);

/// Weight of the product space H1 x H2: block-diag(W1, W2).
WeightedSpace product_space(const SplitClosureSystem& sys);

/// A_S = A11 + A12 S A21 on H1.
ComplexMatrix assemble_a_s(const SplitClosureSystem& sys);

/// Checks the skew pairing W1 A12 = -A21^* W2 (equivalently, A12 is minus
/// the weighted adjoint of A21) through the relative Frobenius residual
/// ||W1 A12 + A21^* W2||_F / (||W1 A12||_F + ||A21^* W2||_F + eps).
PairingCheck check_skew_pairing(const SplitClosureSystem& sys, double tol = 1e-10);

/// ||A_ext (h1; S A21 h1) - (A_S h1; A21 h1)|| / ||h1||. Zero up to
/// roundoff whenever A_ext and A_S come from the same assembly. The
/// explicit-matrix overload serves constrained discretizations that carry
/// matched operator pairs without ever forming a SplitClosureSystem.
double closure_identity_residual(const SplitClosureSystem& sys,
                                 const ComplexVector& h1);
double closure_identity_residual(const ComplexMatrix& a_ext,
                                 const ComplexMatrix& a_s,
                                 const ComplexMatrix& a21,
                                 const ComplexMatrix& s,
                                 const ComplexVector& h1);

/// |<-A_S u, v>_W1 - (<S A21 u, A21 v>_W2 - <A11 u, v>_W1)|. The skew
/// pairing is a precondition (InvalidInput when it fails); under it the
/// two sides agree up to roundoff.
double form_residual(const SplitClosureSystem& sys, const ComplexVector& u,
                     const ComplexVector& v);

/// Full hypothesis check. Dissipativity flags allow the abscissa a
/// roundoff margin of tol * (1 + ||.||_F); the pairing flag uses tol as a
/// relative bound on the Frobenius residual.
StructureVerdict check_structure(const SplitClosureSystem& sys, double tol = 1e-10);

}  // namespace specstab
