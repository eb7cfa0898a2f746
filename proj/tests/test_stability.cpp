// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "specstab/closure.hpp"
#include "specstab/rng.hpp"
#include "specstab/stability.hpp"
#include "support/ensemble.hpp"

using namespace specstab;
using Catch::Approx;

namespace {

constexpr Complex kI{0.0, 1.0};

ComplexMatrix rotation2() {
  ComplexMatrix j(2, 2);
  j << 0, 1, -1, 0;
  return j;
}

// a11 = diag(i, 2i), a21 = [1, 0], skew pairing, s = [1]. The closed
// operator is [[i-1, 0], [0, 2i]] with the peripheral eigenvalue 2i carried
// by e2, which a21 annihilates.
SplitClosureSystem rank_one_system() {
  SplitClosureSystem sys;
  sys.a11 = ComplexMatrix::Zero(2, 2);
  sys.a11(0, 0) = kI;
  sys.a11(1, 1) = 2.0 * kI;
  sys.a21 = ComplexMatrix::Zero(1, 2);
  sys.a21(0, 0) = 1.0;
  sys.a12 = -sys.a21.adjoint();
  sys.s = ComplexMatrix::Identity(1, 1);
  sys.space1 = WeightedSpace::identity(2);
  sys.space2 = WeightedSpace::identity(1);
  return sys;
}

}  // namespace

TEST_CASE("peripheral point spectrum", "[stability][peripheral]") {
  SECTION("rotation matrix carries plus and minus i") {
    const auto modes = peripheral_point_spectrum(rotation2(), 1e-8);
    REQUIRE(modes.size() == 2);
    for (const auto& mode : modes) {
      CHECK(std::abs(std::abs(mode.lambda.imag()) - 1.0) < 1e-12);
      CHECK(std::abs(mode.lambda.real()) < 1e-12);
      CHECK((rotation2() * mode.vector - mode.lambda * mode.vector).norm() < 1e-12);
    }
  }

  SECTION("Turing sum keeps only the imaginary pair") {
    ComplexMatrix a(3, 3);
    a << 0, -1, 1, 1, 0, 0, -1, 0, -1;
    ComplexMatrix b(3, 3);
    b << 0, 2, -1, -2, 0, 0, 1, 0, -1;
    const auto modes = peripheral_point_spectrum(a + b, 1e-8);
    REQUIRE(modes.size() == 2);
    CHECK(std::abs(std::abs(modes[0].lambda.imag()) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(modes[1].lambda.imag()) - 1.0) < 1e-10);
  }

  SECTION("strictly stable operator yields nothing") {
    CHECK(peripheral_point_spectrum(-ComplexMatrix::Identity(3, 3), 1e-8).empty());
  }

  SECTION("nonpositive band is rejected") {
    CHECK_THROWS_AS(peripheral_point_spectrum(rotation2(), 0.0), InvalidInput);
  }
}

TEST_CASE("peripheral inclusion on the extended operator", "[stability][inclusion]") {
  SECTION("rank-one example transfers 2i with witness (e2; 0)") {
    const auto sys = rank_one_system();
    const ComplexMatrix a_s = assemble_a_s(sys);
    const ComplexMatrix a_ext = assemble_a_ext(sys);
    const auto verdict = check_peripheral_inclusion(
        a_s, a_ext, split_pair_builder(sys.a21, sys.s), 1e-10);
    CHECK(verdict.ok);
    REQUIRE(verdict.witnesses.size() == 1);
    const auto& w = verdict.witnesses.front();
    CHECK(std::abs(w.lambda - 2.0 * kI) < 1e-12);
    CHECK(w.residual <= 1e-12);
    CHECK(std::abs(w.witness(2)) < 1e-12);  // a21 annihilates the eigenvector
  }

  SECTION("no peripheral spectrum is vacuously certified") {
    const ComplexMatrix a_s = -ComplexMatrix::Identity(2, 2);
    const ComplexMatrix a_ext = -ComplexMatrix::Identity(3, 3);
    const auto verdict = check_peripheral_inclusion(
        a_s, a_ext, split_pair_builder(ComplexMatrix::Zero(1, 2),
                                       ComplexMatrix::Identity(1, 1)),
        1e-10);
    CHECK(verdict.ok);
    CHECK(verdict.witnesses.empty());
  }

  SECTION("mismatched closure factor is reported") {
    // s = [i] makes A_S = [-i] with eigenvector not annihilated by a21, so
    // the witness only works with the true factor.
    SplitClosureSystem sys;
    sys.a11 = ComplexMatrix::Zero(1, 1);
    sys.a21 = ComplexMatrix::Identity(1, 1);
    sys.a12 = -sys.a21.adjoint();
    sys.s = kI * ComplexMatrix::Identity(1, 1);
    sys.space1 = WeightedSpace::identity(1);
    sys.space2 = WeightedSpace::identity(1);
    const ComplexMatrix a_s = assemble_a_s(sys);
    const ComplexMatrix a_ext = assemble_a_ext(sys);

    const auto good = check_peripheral_inclusion(
        a_s, a_ext, split_pair_builder(sys.a21, sys.s), 1e-10);
    CHECK(good.ok);
    REQUIRE(good.witnesses.size() == 1);

    const auto bad = check_peripheral_inclusion(
        a_s, a_ext,
        split_pair_builder(sys.a21, ComplexMatrix::Identity(1, 1)), 1e-10);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.witnesses.size() == 1);
    CHECK(bad.witnesses.front().residual > 0.1);
  }

  SECTION("witness dimension mismatch is rejected") {
    const auto sys = rank_one_system();
    const auto broken = [](const ComplexVector& v) { return v; };
    CHECK_THROWS_AS(check_peripheral_inclusion(assemble_a_s(sys),
                                               assemble_a_ext(sys), broken, 1e-10),
                    InvalidInput);
  }
}

TEST_CASE("kernel intersection", "[stability][kernel]") {
  SECTION("rank-one example at omega = 2") {
    ComplexMatrix a11 = ComplexMatrix::Zero(2, 2);
    a11(0, 0) = kI;
    a11(1, 1) = 2.0 * kI;
    ComplexMatrix a21 = ComplexMatrix::Zero(1, 2);
    a21(0, 0) = 1.0;
    const ComplexMatrix basis = kernel_intersection(a21, a11, 2.0);
    REQUIRE(basis.cols() == 1);
    CHECK(std::abs(basis(0, 0)) < 1e-12);
    CHECK(std::abs(std::abs(basis(1, 0)) - 1.0) < 1e-12);
  }

  SECTION("injective a21 leaves nothing") {
    Rng rng(3);
    const ComplexMatrix a11 = rng.matrix(3, 3);
    CHECK(kernel_intersection(ComplexMatrix::Identity(3, 3), a11, 0.7).cols() == 0);
  }

  SECTION("difference operator at omega = 0 keeps the constants") {
    const Index n = 6;
    ComplexMatrix grad = ComplexMatrix::Zero(n - 1, n);
    for (Index i = 0; i < n - 1; ++i) {
      grad(i, i) = -1.0;
      grad(i, i + 1) = 1.0;
    }
    const ComplexMatrix basis =
        kernel_intersection(grad, ComplexMatrix::Zero(n, n), 0.0);
    REQUIRE(basis.cols() == 1);
    for (Index i = 0; i < n; ++i) {
      CHECK(std::abs(std::abs(basis(i, 0)) - 1.0 / std::sqrt(double(n))) < 1e-12);
    }
  }

  SECTION("weighted overload returns a W-orthonormal basis") {
    Rng rng(7);
    const auto space = testing::random_space(rng, 4, 2);
    const ComplexMatrix basis = kernel_intersection(
        ComplexMatrix::Zero(2, 4), ComplexMatrix::Zero(4, 4), 0.0, kRankTol, space);
    REQUIRE(basis.cols() == 4);
    const ComplexMatrix gram = basis.adjoint() * space.apply_weight(basis);
    CHECK((gram - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("dissipativity margins", "[stability][margin]") {
  const auto id2 = WeightedSpace::identity(2);

  SECTION("scalar examples") {
    CHECK(strict_dissipativity_margin(-3.0 * ComplexMatrix::Identity(2, 2), id2) ==
          Approx(3.0).margin(1e-12));
    CHECK(strict_dissipativity_margin(rotation2(), id2) == Approx(0.0).margin(1e-14));
  }

  SECTION("condition 1 margin on the companion example") {
    ComplexMatrix a_ext(2, 2);
    a_ext << -1, -1, 1, 0;
    CHECK(thm39_condition1_margin(a_ext, id2, 1) == Approx(1.0).margin(1e-9));
    CHECK(thm39_condition1_margin(rotation2(), id2, 1) == Approx(0.0).margin(1e-12));
  }

  SECTION("condition 1 margin bounds the closed abscissa") {
    Rng rng(13);
    testing::PlantedOptions opts;
    opts.max_peripheral = 0;  // strict decay throughout component 1
    for (int trial = 0; trial < 25; ++trial) {
      const auto planted = testing::random_planted_split(rng, opts);
      const ComplexMatrix a_ext = assemble_a_ext(planted.sys);
      const double eps = thm39_condition1_margin(
          a_ext, product_space(planted.sys), planted.sys.space1.dim());
      CHECK(eps >= 0.0);
      const double abscissa =
          numerical_abscissa(assemble_a_s(planted.sys), planted.sys.space1);
      CHECK(abscissa <= -eps + 1e-8 * (1.0 + a_ext.norm()));
    }
  }

  SECTION("condition 2 bound") {
    const auto id3 = WeightedSpace::identity(3);
    CHECK(thm39_condition2_bound(ComplexMatrix::Identity(3, 3),
                                 0.7 * ComplexMatrix::Identity(3, 3), id3, id3) ==
          Approx(0.7).margin(1e-12));
    CHECK(thm39_condition2_bound(2.0 * ComplexMatrix::Identity(3, 3),
                                 ComplexMatrix::Identity(3, 3), id3, id3) ==
          Approx(4.0).margin(1e-12));
    // Wide a21 has a kernel: no bound.
    CHECK(thm39_condition2_bound(ComplexMatrix::Ones(1, 2),
                                 ComplexMatrix::Identity(1, 1),
                                 WeightedSpace::identity(2),
                                 WeightedSpace::identity(1)) == 0.0);
  }

  SECTION("condition 2 bound is a weighted invariant") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix a21_std = rng.matrix(5, 3);
      const ComplexMatrix s_std =
          0.4 * ComplexMatrix::Identity(5, 5) + rng.hermitian_pd(5, 0.0);
      const double reference = thm39_condition2_bound(
          a21_std, s_std, WeightedSpace::identity(3), WeightedSpace::identity(5));

      const auto sp1 = testing::random_space(rng, 3);
      const auto sp2 = testing::random_space(rng, 5);
      const ComplexMatrix a21 = testing::transport(a21_std, sp1, sp2);
      const ComplexMatrix s = testing::transport(s_std, sp2, sp2);
      CHECK(thm39_condition2_bound(a21, s, sp1, sp2) ==
            Approx(reference).margin(1e-8 * (1.0 + reference)));
    }
  }
}

TEST_CASE("resolvent norm scan", "[stability][resolvent]") {
  SECTION("scalar oracles") {
    const ComplexMatrix a = -ComplexMatrix::Identity(2, 2);
    const auto scan = resolvent_norm_scan(a, {0.0, 1.0});
    REQUIRE(scan.size() == 2);
    CHECK_FALSE(scan[0].singular);
    CHECK(scan[0].norm == Approx(1.0).margin(1e-12));
    CHECK(scan[1].norm == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
  }

  SECTION("spectrum hits are flagged") {
    const auto scan = resolvent_norm_scan(rotation2(), {1.0, 0.5});
    REQUIRE(scan.size() == 2);
    CHECK(scan[0].singular);
    CHECK(std::isinf(scan[0].norm));
    CHECK_FALSE(scan[1].singular);
  }

  SECTION("parallel and serial paths agree exactly") {
    Rng rng(23);
    const ComplexMatrix a = rng.matrix(6, 6);
    const std::vector<double> grid{-2.0, -0.5, 0.0, 0.3, 1.7, 4.0, 9.0};
    const auto par = resolvent_norm_scan(a, grid);
    const auto ser = resolvent_norm_scan_serial(a, grid);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].omega == ser[i].omega);
      CHECK(par[i].norm == ser[i].norm);
      CHECK(par[i].singular == ser[i].singular);
    }

    const auto space = testing::random_space(rng, 6, 2);
    const auto wpar = resolvent_norm_scan(a, space, grid);
    const auto wser = resolvent_norm_scan_serial(a, space, grid);
    for (std::size_t i = 0; i < wpar.size(); ++i) {
      CHECK(wpar[i].norm == wser[i].norm);
    }
  }

  SECTION("weighted scan matches the transported 2-norm") {
    Rng rng(29);
    const ComplexMatrix a = rng.matrix(5, 5) - 4.0 * ComplexMatrix::Identity(5, 5);
    const auto space = testing::random_space(rng, 5, 2);
    const double omega = 1.3;
    const auto scan = resolvent_norm_scan(a, space, {omega});
    REQUIRE(scan.size() == 1);

    const ComplexMatrix shifted =
        kI * omega * ComplexMatrix::Identity(5, 5) - a;
    const ComplexMatrix inv = shifted.partialPivLu().inverse();
    const ComplexMatrix transported =
        space.apply_factor_adjoint(space.solve_factor((inv.adjoint())).adjoint());
    CHECK(scan[0].norm == Approx(operator_norm(transported)).epsilon(1e-9));
  }
}

TEST_CASE("numerical range boundary", "[stability][range]") {
  SECTION("scalar multiple of the identity collapses to a point") {
    const auto pts = numerical_range_boundary(-ComplexMatrix::Identity(3, 3),
                                              WeightedSpace::identity(3), 8);
    REQUIRE(pts.size() == 8);
    for (const auto& z : pts) CHECK(std::abs(z - Complex(-1.0, 0.0)) < 1e-12);
  }

  SECTION("sector example stays on the ray arg = -3pi/4") {
    const Index n = 5;
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k + 1);
      a(k, k) = -Complex(1.0, 1.0) * kk * kk;
    }
    const auto pts = numerical_range_boundary(a, WeightedSpace::identity(n), 64);
    const double ray = -3.0 * std::numbers::pi / 4.0;
    for (const auto& z : pts) {
      CHECK(std::abs(z) >= std::sqrt(2.0) - 1e-10);
      CHECK(std::abs(std::arg(z) - ray) < 1e-10);
    }
  }

  SECTION("skew operators land on the imaginary axis") {
    Rng rng(31);
    const ComplexMatrix a = rng.skew_hermitian(4);
    const auto pts = numerical_range_boundary(a, WeightedSpace::identity(4), 12);
    for (const auto& z : pts) CHECK(std::abs(z.real()) < 1e-12 * (1.0 + a.norm()));
  }

  SECTION("parallel and serial paths agree exactly") {
    Rng rng(37);
    const ComplexMatrix a = rng.matrix(5, 5);
    const auto space = testing::random_space(rng, 5, 1);
    const auto par = numerical_range_boundary(a, space, 16);
    const auto ser = numerical_range_boundary_serial(a, space, 16);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);
  }

  SECTION("angle count is validated") {
    CHECK_THROWS_AS(numerical_range_boundary(rotation2(), WeightedSpace::identity(2), 2),
                    InvalidInput);
  }
}

TEST_CASE("positivity probe", "[stability][positivity]") {
  SECTION("graph Laplacian semigroup is positive") {
    const Index n = 5;
    ComplexMatrix lap = ComplexMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      if (i > 0) lap(i, i - 1) = 1.0;
      if (i + 1 < n) lap(i, i + 1) = 1.0;
      lap(i, i) = -((i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0));
    }
    CHECK(positivity_probe(lap, {0.1, 1.0, 5.0}, 1e-12));
  }

  SECTION("rotation loses positivity at t = pi") {
    CHECK_FALSE(positivity_probe(rotation2(), {std::numbers::pi}, 1e-8));
  }

  SECTION("diagonal decay stays positive") {
    CHECK(positivity_probe(-ComplexMatrix::Identity(3, 3), {0.5, 2.0}, 0.0));
  }

  SECTION("nonpositive times are rejected") {
    CHECK_THROWS_AS(positivity_probe(rotation2(), {0.0}, 1e-8), InvalidInput);
  }
}

TEST_CASE("limit projection", "[stability][limit]") {
  const auto id2 = WeightedSpace::identity(2);

  SECTION("diag(0, -1) projects onto the first coordinate") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(1, 1) = -1.0;
    const auto p = limit_projection(a, id2, 1e-8);
    REQUIRE(p.has_value());
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK((*p - expected).norm() < 1e-12);
  }

  SECTION("rotation has no limit") {
    CHECK_FALSE(limit_projection(rotation2(), id2, 1e-8).has_value());
  }

  SECTION("invertible dissipative operator decays to zero") {
    const auto p = limit_projection(-ComplexMatrix::Identity(2, 2), id2, 1e-8);
    REQUIRE(p.has_value());
    CHECK(p->norm() == 0.0);
  }

  SECTION("agrees with the long-time exponential") {
    Rng rng(41);
    const Index n = 5;
    const ComplexMatrix q = testing::random_unitary(rng, n);
    RealVector d(n);
    d << 0.0, 0.0, -0.5, -1.0, -2.0;
    const ComplexMatrix a = q * d.cast<Complex>().asDiagonal() * q.adjoint();
    const auto space = WeightedSpace::identity(n);

    const auto p = limit_projection(a, space, 1e-8);
    REQUIRE(p.has_value());
    const ComplexMatrix analytic =
        q.leftCols(2) * q.leftCols(2).adjoint();
    CHECK((*p - analytic).norm() < 1e-10);

    const double gap = 0.5;
    const ComplexMatrix e = expm((40.0 / gap) * a);
    CHECK((e - *p).norm() <= 1e-6);
    CHECK((*p * *p - *p).norm() < 1e-12);
  }

  SECTION("non-dissipative input is rejected") {
    CHECK_THROWS_AS(limit_projection(ComplexMatrix::Identity(2, 2), id2, 1e-8),
                    InvalidInput);
  }
}

TEST_CASE("propagation schemes", "[stability][propagate]") {
  const auto id2 = WeightedSpace::identity(2);

  SECTION("exponential scheme reproduces e^{-t}") {
    const ComplexMatrix a = -ComplexMatrix::Identity(2, 2);
    const ComplexVector x0 = ComplexVector::Unit(2, 0);
    const auto traj = propagate(a, id2, x0, 2.0, 0.1, Scheme::Expm);
    REQUIRE(traj.times.size() == 21);
    REQUIRE(traj.norms.size() == 21);
    CHECK(traj.times.back() == 2.0);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      CHECK(traj.norms[k] == Approx(std::exp(-traj.times[k])).epsilon(1e-12));
    }
    CHECK((traj.final_state - std::exp(-2.0) * x0).norm() < 1e-12);
  }

  SECTION("Crank-Nicolson preserves skew norms") {
    const ComplexVector x0 = ComplexVector::Ones(2);
    const auto traj = propagate(rotation2(), id2, x0, 10.0, 0.05, Scheme::CrankNicolson);
    for (double norm : traj.norms) {
      CHECK(norm == Approx(traj.norms.front()).epsilon(1e-12));
    }
  }

  SECTION("backward Euler matches the geometric decay") {
    const ComplexMatrix a = -ComplexMatrix::Identity(1, 1);
    const ComplexVector x0 = ComplexVector::Ones(1);
    const auto traj =
        propagate(a, WeightedSpace::identity(1), x0, 1.0, 0.25, Scheme::BackwardEuler);
    REQUIRE(traj.norms.size() == 5);
    for (std::size_t k = 0; k < traj.norms.size(); ++k) {
      CHECK(traj.norms[k] ==
            Approx(std::pow(1.25, -static_cast<double>(k))).epsilon(1e-12));
    }
  }

  SECTION("Crank-Nicolson contracts dissipative ensembles") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      const auto planted = testing::random_planted_split(rng);
      const ComplexMatrix a_ext = assemble_a_ext(planted.sys);
      const auto space = product_space(planted.sys);
      const ComplexVector x0 = rng.matrix(space.dim(), 1);
      const auto traj = propagate(a_ext, space, x0, 3.0, 0.05, Scheme::CrankNicolson);
      for (std::size_t k = 1; k < traj.norms.size(); ++k) {
        CHECK(traj.norms[k] <= traj.norms[k - 1] * (1.0 + 1e-12));
      }
    }
  }

  SECTION("singular step matrices are reported") {
    const ComplexMatrix a = 2.0 * ComplexMatrix::Identity(1, 1);
    const ComplexVector x0 = ComplexVector::Ones(1);
    CHECK_THROWS_AS(
        propagate(a, WeightedSpace::identity(1), x0, 2.0, 1.0, Scheme::CrankNicolson),
        NumericalFailure);
    CHECK_THROWS_AS(
        propagate(0.5 * a, WeightedSpace::identity(1), x0, 2.0, 1.0, Scheme::BackwardEuler),
        NumericalFailure);
  }

  SECTION("argument validation") {
    const ComplexVector x0 = ComplexVector::Ones(2);
    CHECK_THROWS_AS(propagate(rotation2(), id2, x0, 1.0, 0.0, Scheme::Expm), InvalidInput);
    CHECK_THROWS_AS(propagate(rotation2(), id2, x0, -1.0, 0.1, Scheme::Expm), InvalidInput);
    CHECK_THROWS_AS(propagate(rotation2(), id2, ComplexVector::Ones(3), 1.0, 0.1,
                              Scheme::Expm),
                    InvalidInput);
  }

  SECTION("scheme names round-trip") {
    CHECK(parse_scheme("crank-nicolson") == Scheme::CrankNicolson);
    CHECK(parse_scheme("backward-euler") == Scheme::BackwardEuler);
    CHECK(parse_scheme("expm") == Scheme::Expm);
    CHECK_FALSE(parse_scheme("rk4").has_value());
    CHECK(std::string(to_string(Scheme::CrankNicolson)) == "crank-nicolson");
  }
}

TEST_CASE("decay rate fit", "[stability][decay]") {
  SECTION("exact exponential samples") {
    Trajectory traj;
    for (int k = 0; k <= 100; ++k) {
      const double t = 0.05 * k;
      traj.times.push_back(t);
      traj.norms.push_back(std::exp(-2.0 * t));
    }
    CHECK(decay_rate_fit(traj, 0.5) == Approx(-2.0).margin(1e-8));
  }

  SECTION("slowest mode dominates the tail") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -3.0;
    const ComplexVector x0 = ComplexVector::Ones(2);
    const auto traj =
        propagate(a, WeightedSpace::identity(2), x0, 20.0, 0.05, Scheme::Expm);
    CHECK(decay_rate_fit(traj, 0.3) == Approx(-1.0).margin(1e-3));
  }

  SECTION("oscillation fits a zero rate") {
    const ComplexVector x0 = ComplexVector::Ones(2);
    const auto traj = propagate(rotation2(), WeightedSpace::identity(2), x0, 5.0, 0.05,
                                Scheme::CrankNicolson);
    CHECK(std::abs(decay_rate_fit(traj, 0.5)) < 1e-10);
  }

  SECTION("validation") {
    Trajectory traj;
    traj.times = {0.0, 1.0};
    traj.norms = {1.0, 0.0};
    CHECK_THROWS_AS(decay_rate_fit(traj, 1.0), InvalidInput);
    CHECK_THROWS_AS(decay_rate_fit(traj, 0.0), InvalidInput);
    Trajectory flat;
    flat.times = {0.0};
    flat.norms = {1.0};
    CHECK_THROWS_AS(decay_rate_fit(flat, 1.0), InvalidInput);
  }
}

TEST_CASE("stability classification table", "[stability][verdict]") {
  const auto id2 = WeightedSpace::identity(2);

  SECTION("strict dissipativity") {
    const auto v = assess_stability(-2.0 * ComplexMatrix::Identity(2, 2), id2);
    CHECK(v.classification == StabilityClass::StrictlyDissipative);
    CHECK(v.strict_margin == Approx(2.0).margin(1e-10));
    CHECK(v.growth_bound == Approx(-2.0).margin(1e-10));
    CHECK(v.peripheral_eigs.empty());
  }

  SECTION("marginal rotation") {
    const auto v = assess_stability(rotation2(), id2);
    CHECK(v.classification == StabilityClass::Marginal);
    CHECK(v.peripheral_eigs.size() == 2);
    CHECK(std::string(to_string(v.classification)) == "marginal");
  }

  SECTION("unstable growth") {
    const auto v = assess_stability(0.5 * ComplexMatrix::Identity(2, 2), id2);
    CHECK(v.classification == StabilityClass::Unstable);
  }

  SECTION("exponentially stable despite a positive abscissa") {
    ComplexMatrix a(2, 2);
    a << -0.1, 1.0, 0.0, -0.1;
    const auto v = assess_stability(a, id2);
    CHECK(v.classification == StabilityClass::ExponentiallyStable);
    CHECK(v.abscissa > 0.0);
    CHECK(v.growth_bound == Approx(-0.1).margin(1e-10));

    AssessOptions probe;
    probe.strong_stability_probe = true;
    CHECK(assess_stability(a, id2, probe).classification ==
          StabilityClass::StronglyStableProbePassed);
  }

  SECTION("resolvent summary feeds the verdict") {
    AssessOptions opts;
    opts.resolvent_grid = {0.0, 1.0};
    const auto v = assess_stability(-ComplexMatrix::Identity(2, 2), id2, opts);
    CHECK(v.resolvent_sup == Approx(1.0).margin(1e-12));
    CHECK_FALSE(v.resolvent_unbounded);

    const auto sing = assess_stability(rotation2(), id2, opts);
    CHECK(sing.resolvent_unbounded);
    CHECK(std::isinf(sing.resolvent_sup));
  }

  SECTION("growth bound never exceeds the abscissa") {
    Rng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
      const auto planted = testing::random_planted_split(rng);
      const ComplexMatrix a_s = assemble_a_s(planted.sys);
      const auto v = assess_stability(a_s, planted.sys.space1);
      CHECK(v.growth_bound <= v.abscissa + 1e-10 * (1.0 + a_s.norm()));
    }
  }
}

TEST_CASE("planted ensemble theorems", "[stability][ensemble]") {
  SECTION("peripheral inclusion holds with planted modes") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
      const auto planted = testing::random_planted_split(rng);
      const ComplexMatrix a_s = assemble_a_s(planted.sys);
      const ComplexMatrix a_ext = assemble_a_ext(planted.sys);
      const auto verdict = check_peripheral_inclusion(
          a_s, a_ext, split_pair_builder(planted.sys.a21, planted.sys.s), 1e-8,
          1e-6);
      CHECK(verdict.ok);
      CHECK(verdict.witnesses.size() == planted.omegas.size());
      for (const auto& w : verdict.witnesses) CHECK(w.residual <= 1e-8);
    }
  }

  SECTION("kernel equality at the planted frequencies") {
    Rng rng(103);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto planted = testing::random_planted_split(rng);
      if (planted.omegas.empty()) continue;
      const ComplexMatrix a_s = assemble_a_s(planted.sys);
      const Index n1 = planted.sys.space1.dim();
      for (double omega : planted.omegas) {
        const ComplexMatrix lhs = null_space(
            Complex(0.0, omega) * ComplexMatrix::Identity(n1, n1) - a_s, 1e-8);
        const ComplexMatrix rhs = kernel_intersection(
            planted.sys.a21, planted.sys.a11, omega, 1e-8);
        REQUIRE(lhs.cols() == rhs.cols());
        REQUIRE(lhs.cols() >= 1);
        CHECK(principal_angle(lhs, rhs, planted.sys.space1) <= 1e-8);
        ++checked;
      }
    }
    CHECK(checked >= 50);
  }

  SECTION("injective coupling empties the peripheral spectrum") {
    Rng rng(107);
    testing::PlantedOptions opts;
    opts.injective_a21 = true;
    for (int trial = 0; trial < 100; ++trial) {
      const auto planted = testing::random_planted_split(rng, opts);
      const ComplexMatrix a_s = assemble_a_s(planted.sys);
      CHECK(peripheral_point_spectrum(a_s, 1e-8).empty());

      const double bound = thm39_condition2_bound(
          planted.sys.a21, planted.sys.s, planted.sys.space1, planted.sys.space2);
      CHECK(bound > 0.0);
      const double abscissa = numerical_abscissa(a_s, planted.sys.space1);
      CHECK(abscissa <= -bound + 1e-10 * (1.0 + a_s.norm()));
    }
  }
}
