// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "specstab/coupled.hpp"
#include "specstab/rng.hpp"
#include "specstab/stability.hpp"
#include "support/ensemble.hpp"

using namespace specstab;
using Catch::Approx;

namespace {

constexpr Complex kI{0.0, 1.0};

CoupledParabolicSpec basic_spec(Index n_components, Index n_nodes,
                                const ComplexMatrix& v,
                                CoupledKind kind = CoupledKind::Heat) {
  CoupledParabolicSpec spec;
  spec.n_components = n_components;
  spec.grid = {0.0, 1.0, n_nodes};
  spec.kind = kind;
  spec.potential = {{0.0, 1.0, v}};
  return spec;
}

ComplexMatrix rotation_v() {
  ComplexMatrix v(2, 2);
  v << 0.0, 1.0, -1.0, 0.0;
  return v;
}

/// Dissipative piece with eigenvector w at i*beta and everything orthogonal
/// to w damped below -0.3. beta = 0 plants a kernel vector instead.
ComplexMatrix planted_piece(Rng& rng, const ComplexVector& w, double beta) {
  const Index n = w.size();
  const ComplexMatrix proj =
      ComplexMatrix::Identity(n, n) - w * w.adjoint();
  const ComplexMatrix damped = rng.skew_hermitian(n) - rng.hermitian_pd(n, 0.3);
  return Complex(0.0, beta) * (w * w.adjoint()) + proj * damped * proj;
}

ComplexMatrix strict_piece(Rng& rng, Index n) {
  return rng.skew_hermitian(n) - rng.hermitian_pd(n, 0.3);
}

ComplexVector lift_constant(const ComplexVector& c, Index n_nodes) {
  ComplexVector out(c.size() * n_nodes);
  for (Index k = 0; k < c.size(); ++k) {
    out.segment(k * n_nodes, n_nodes).setConstant(c(k));
  }
  return out;
}

}  // namespace

TEST_CASE("coupled operator assembly", "[coupled][build]") {
  SECTION("single heat component without potential is the Neumann Laplacian") {
    const auto spec = basic_spec(1, 15, ComplexMatrix::Zero(1, 1));
    const auto op = build_coupled_operator(spec);
    const auto pair = staggered_gradient(spec.grid);
    const ComplexMatrix lap =
        -weighted_adjoint(pair.d_plus, pair.w_nodes, pair.w_cells) *
        pair.d_plus;
    CHECK((op.c - lap).norm() <= 1e-14 * lap.norm());
    CHECK(std::abs(numerical_abscissa(op.c, op.space)) <=
          1e-10 * (1.0 + op.c.norm()));
    const ComplexMatrix kernel = null_space(op.c);
    REQUIRE(kernel.cols() == 1);
    CHECK(principal_angle(kernel, ComplexVector::Ones(15), op.space) <= 1e-8);
  }

  SECTION("constant rotation potential has the exact oscillatory mode") {
    const auto spec = basic_spec(2, 13, rotation_v());
    const auto op = build_coupled_operator(spec);
    ComplexVector c(2);
    c << 1.0, kI;
    const ComplexVector x = lift_constant(c, 13);
    CHECK((op.c * x - kI * x).norm() <= 1e-14 * (1.0 + op.c.norm()));
  }

  SECTION("biharmonic spectrum is minus the squared Laplacian spectrum") {
    const auto spec =
        basic_spec(1, 12, ComplexMatrix::Zero(1, 1), CoupledKind::Biharmonic);
    const auto op = build_coupled_operator(spec);
    const auto pair = staggered_gradient(spec.grid);
    const ComplexMatrix lap =
        -weighted_adjoint(pair.d_plus, pair.w_nodes, pair.w_cells) *
        pair.d_plus;
    auto mu = eig(lap).report.eigenvalues;
    auto got = eig(op.c).report.eigenvalues;
    std::vector<double> expected;
    for (const Complex m : mu) expected.push_back(-m.real() * m.real());
    std::sort(expected.begin(), expected.end(), std::greater<>());
    const double tol = 1e-10 * (1.0 + op.c.norm());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i] - Complex(expected[i])) <= tol);
    }
    CHECK(numerical_abscissa(op.c, op.space) <= 1e-12 * (1.0 + op.c.norm()));
  }

  SECTION("diffusion part is block diagonal, dissipative, kernel constants") {
    CoupledParabolicSpec spec = basic_spec(2, 11, rotation_v());
    spec.coefficients = {
        [](double) { return Complex(1.0); },
        [](double z) { return Complex(2.0 + std::sin(std::numbers::pi * z)); }};
    const auto op = build_coupled_operator(spec);
    const ComplexMatrix diffusion = op.c - op.a11_block();
    const Index n = 11;
    CHECK(diffusion.block(0, n, n, n).norm() == 0.0);
    CHECK(diffusion.block(n, 0, n, n).norm() == 0.0);
    const auto node_space = trapezoid_space(spec.grid);
    for (Index k = 0; k < 2; ++k) {
      const ComplexMatrix block = diffusion.block(k * n, k * n, n, n);
      CHECK(numerical_abscissa(block, node_space) <=
            1e-12 * (1.0 + block.norm()));
      const ComplexMatrix kernel = null_space(block);
      REQUIRE(kernel.cols() == 1);
      CHECK(principal_angle(kernel, ComplexVector::Ones(n), node_space) <=
            1e-8);
    }
  }

  SECTION("spec validation") {
    auto spec = basic_spec(2, 9, rotation_v());
    spec.potential.clear();
    CHECK_THROWS_AS(build_coupled_operator(spec), InvalidInput);
    spec = basic_spec(2, 9, rotation_v());
    spec.potential = {{0.0, 0.4, rotation_v()}, {0.5, 1.0, rotation_v()}};
    CHECK_THROWS_AS(build_coupled_operator(spec), InvalidInput);
    spec = basic_spec(2, 9, ComplexMatrix::Zero(3, 3));
    CHECK_THROWS_AS(build_coupled_operator(spec), InvalidInput);
    spec = basic_spec(2, 9, rotation_v());
    spec.coefficients = {[](double) { return Complex(1.0); }};
    CHECK_THROWS_AS(build_coupled_operator(spec), InvalidInput);
    spec = basic_spec(1, 9, ComplexMatrix::Zero(1, 1));
    spec.coefficients = {[](double z) { return Complex(z - 0.5); }};
    CHECK_THROWS_AS(build_coupled_operator(spec), InvalidInput);
  }

  SECTION("interface nodes belong to the left piece") {
    auto spec = basic_spec(2, 9, rotation_v());
    spec.potential = {{0.0, 0.5, rotation_v()}, {0.5, 1.0, 2.0 * rotation_v()}};
    CHECK(piece_index_at(spec, 0.25) == 0);
    CHECK(piece_index_at(spec, 0.5) == 0);
    CHECK(piece_index_at(spec, 0.5 + 1e-9) == 1);
    CHECK(piece_index_at(spec, 1.0) == 1);
  }
}

TEST_CASE("potential piece checks", "[coupled][vcondition]") {
  SECTION("dissipativity flags") {
    auto spec = basic_spec(2, 9, rotation_v());
    CHECK(check_v_dissipative(spec) == std::vector<bool>{true});
    ComplexMatrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, 0.0;
    spec.potential = {{0.0, 1.0, bad}};
    CHECK(check_v_dissipative(spec) == std::vector<bool>{false});
  }

  SECTION("the activator-inhibitor pieces are both dissipative") {
    ComplexMatrix a(3, 3);
    a << 0.0, -1.0, 1.0, 1.0, 0.0, 0.0, -1.0, 0.0, -1.0;
    ComplexMatrix b(3, 3);
    b << 0.0, 2.0, -1.0, -2.0, 0.0, 0.0, 1.0, 0.0, -1.0;
    auto spec = basic_spec(3, 9, a);
    spec.potential = {{0.0, 0.5, a}, {0.5, 1.0, b}};
    CHECK(check_v_dissipative(spec) == std::vector<bool>{true, true});
  }

  SECTION("single rotation piece fails with the expected witness") {
    const auto spec = basic_spec(2, 9, rotation_v());
    const auto verdict = check_v_condition(spec);
    REQUIRE_FALSE(verdict.holds);
    REQUIRE(verdict.failing_beta.has_value());
    CHECK(*verdict.failing_beta == Approx(1.0).margin(1e-12));
    REQUIRE(verdict.witness.has_value());
    const ComplexVector& w = *verdict.witness;
    CHECK(std::abs(w(1) / w(0) - kI) < 1e-10);
    CHECK((kI * w - rotation_v() * w).norm() <= 1e-10);
  }

  SECTION("pieces with disjoint oscillation frequencies pass") {
    auto spec = basic_spec(2, 9, rotation_v());
    spec.potential = {{0.0, 0.5, rotation_v()}, {0.5, 1.0, 2.0 * rotation_v()}};
    const auto verdict = check_v_condition(spec);
    CHECK(verdict.holds);
    CHECK_FALSE(verdict.failing_beta.has_value());
  }

  SECTION("a purely damping potential passes") {
    ComplexMatrix damp(2, 2);
    damp << 0.0, 0.0, 0.0, -1.0;
    const auto verdict = check_v_condition(basic_spec(2, 9, damp));
    CHECK(verdict.holds);
    CHECK(verdict.per_piece_dissipative == std::vector<bool>{true});
  }
}

TEST_CASE("limit projection prediction", "[coupled][projection]") {
  SECTION("no potential gives the weighted mean") {
    const auto spec = basic_spec(1, 17, ComplexMatrix::Zero(1, 1));
    const ComplexMatrix p = predict_limit_projection(spec);
    const auto space = trapezoid_space(spec.grid);
    ComplexVector x(17);
    for (Index i = 0; i < 17; ++i) x(i) = Complex(spec.grid.node(i), 0.3);
    Complex mean = 0.0;
    for (Index i = 0; i < 17; ++i) {
      mean += space.diagonal()(i) * x(i);
    }
    mean /= spec.grid.b - spec.grid.a;
    CHECK((p * x - ComplexVector::Constant(17, mean)).norm() <= 1e-12);
    CHECK((p * p - p).norm() <= 1e-12);
  }

  SECTION("partial damping keeps only the undamped component mean") {
    ComplexMatrix damp(2, 2);
    damp << 0.0, 0.0, 0.0, -1.0;
    const auto spec = basic_spec(2, 17, damp);
    const ComplexMatrix p = predict_limit_projection(spec);
    ComplexVector x(34);
    for (Index i = 0; i < 34; ++i) x(i) = Complex(0.1 * i, -0.2);
    const ComplexVector px = p * x;
    const auto space = trapezoid_space(spec.grid);
    Complex mean = 0.0;
    for (Index i = 0; i < 17; ++i) mean += space.diagonal()(i) * x(i);
    mean /= spec.grid.b - spec.grid.a;
    CHECK((px.segment(0, 17) - ComplexVector::Constant(17, mean)).norm() <=
          1e-12);
    CHECK(px.segment(17, 17).norm() <= 1e-12);
  }

  SECTION("disjoint rotations leave nothing in the limit") {
    auto spec = basic_spec(2, 9, rotation_v());
    spec.potential = {{0.0, 0.5, rotation_v()}, {0.5, 1.0, 2.0 * rotation_v()}};
    CHECK(predict_limit_projection(spec).norm() == 0.0);
  }

  SECTION("hypothesis failures are rejected") {
    CHECK_THROWS_AS(predict_limit_projection(basic_spec(2, 9, rotation_v())),
                    InvalidInput);
    ComplexMatrix growing(2, 2);
    growing << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(predict_limit_projection(basic_spec(2, 9, growing)),
                    InvalidInput);
  }
}

TEST_CASE("eigenspace intersection matches brute-force spectra",
          "[coupled][ensemble]") {
  Rng rng(811);
  int holds_count = 0;
  int fails_count = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index nc = 1 + static_cast<Index>(rng.next_u64() % 3);
    const int n_pieces = 1 + static_cast<int>(rng.next_u64() % 3);
    const int kind = trial % 4;

    ComplexVector w = rng.matrix(nc, 1).col(0);
    w /= w.norm();
    const double beta =
        (rng.uniform() < 0.5 ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);

    CoupledParabolicSpec spec;
    spec.n_components = nc;
    spec.grid = {0.0, 1.0, 12};
    spec.kind = CoupledKind::Heat;
    for (int j = 0; j < n_pieces; ++j) {
      PotentialPiece piece;
      piece.lo = static_cast<double>(j) / n_pieces;
      piece.hi = static_cast<double>(j + 1) / n_pieces;
      switch (kind) {
        case 0: piece.v = strict_piece(rng, nc); break;
        case 1: piece.v = planted_piece(rng, w, beta); break;
        case 2: piece.v = planted_piece(rng, w, 0.0); break;
        default:
          piece.v = (j == 0) ? planted_piece(rng, w, beta)
                             : strict_piece(rng, nc);
          break;
      }
      spec.potential.push_back(piece);
    }

    const auto verdict = check_v_condition(spec);
    const auto op = build_coupled_operator(spec);
    const auto modes = peripheral_point_spectrum(op.c, 1e-8);
    bool peripheral_in_zero = true;
    for (const auto& mode : modes) {
      if (std::abs(mode.lambda.imag()) > 1e-8) peripheral_in_zero = false;
    }
    INFO("trial " << trial << " kind " << kind << " nc " << nc << " pieces "
                  << n_pieces);
    CHECK(verdict.holds == peripheral_in_zero);
    verdict.holds ? ++holds_count : ++fails_count;

    if (!verdict.holds) {
      REQUIRE(verdict.failing_beta.has_value());
      REQUIRE(verdict.witness.has_value());
      for (const auto& piece : spec.potential) {
        const ComplexVector defect =
            Complex(0.0, *verdict.failing_beta) * (*verdict.witness) -
            piece.v * (*verdict.witness);
        CHECK(defect.norm() <= 1e-10 * (1.0 + piece.v.norm()));
      }
      // The planted frequency and direction are recovered.
      CHECK(*verdict.failing_beta == Approx(beta).margin(1e-8));
      CHECK(principal_angle(*verdict.witness, w,
                            WeightedSpace::identity(nc)) <= 1e-7);

      // Kernel characterization: eigenspace of C at i*beta is the constant
      // lift of the common kernel.
      const Complex shift(0.0, *verdict.failing_beta);
      const ComplexMatrix shifted =
          shift * ComplexMatrix::Identity(op.c.rows(), op.c.cols()) - op.c;
      const ComplexMatrix eigenspace = null_space(shifted);
      REQUIRE(eigenspace.cols() >= 1);
      const ComplexVector lifted = lift_constant(*verdict.witness, 12);
      CHECK(principal_angle(eigenspace, lifted, op.space) <= 1e-8);
    }
  }
  CHECK(holds_count >= 15);
  CHECK(fails_count >= 10);
}

TEST_CASE("simulation agrees with the predicted limit", "[coupled][simulate]") {
  SECTION("partially damped potential converges to its projection") {
    ComplexMatrix damp(2, 2);
    damp << 0.0, 0.0, 0.0, -1.0;
    const auto spec = basic_spec(2, 40, damp);
    const auto report = simulate_and_compare(spec, 6.0, 0.004);
    CHECK(report.converging);
    CHECK(report.spectral_gap == Approx(1.0).margin(0.05));
    REQUIRE(report.expm_distance.has_value());
    CHECK(*report.expm_distance <= 1e-4);
    REQUIRE(report.probe_distances.size() == 2);
    CHECK(report.probe_distances[1] < report.probe_distances[0]);
    CHECK(report.probe_distances[1] <= 0.05);
  }

  SECTION("rotation potential oscillates with constant norm") {
    const auto spec = basic_spec(2, 40, rotation_v());
    const auto report = simulate_and_compare(spec, 20.0, 0.01);
    CHECK_FALSE(report.converging);
    CHECK(report.probe_norm_drift <= 1e-10);
    REQUIRE(report.probe_distances.size() == 2);
    // The probe is an exact oscillatory mode and the limit projection is
    // zero here, so the distance stays at the full unit norm.
    CHECK(report.probe_distances[0] >= 0.9);
    CHECK(report.probe_distances[1] >= 0.9);
    CHECK(report.probe_times[0] == Approx(10.0));
    CHECK(report.probe_times[1] == Approx(20.0));
  }

  SECTION("scalar heat converges to the mean") {
    const auto spec = basic_spec(1, 30, ComplexMatrix::Zero(1, 1));
    const auto report = simulate_and_compare(spec, 5.0, 0.005);
    CHECK(report.converging);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(report.spectral_gap == Approx(pi2).epsilon(0.05));
    REQUIRE(report.expm_distance.has_value());
    CHECK(*report.expm_distance <= 1e-4);
    CHECK(report.probe_distances[1] <= 1e-2);
  }

  SECTION("argument validation") {
    const auto spec = basic_spec(1, 9, ComplexMatrix::Zero(1, 1));
    CHECK_THROWS_AS(simulate_and_compare(spec, -1.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(simulate_and_compare(spec, 1.0, 0.0), InvalidInput);
  }
}
