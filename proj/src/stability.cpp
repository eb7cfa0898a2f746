// SPDX-License-Identifier: Apache-2.0
#include "specstab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "specstab/closure.hpp"
#include "specstab/parallel.hpp"

namespace specstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_operator(const ComplexMatrix& a, const WeightedSpace& space,
                      const char* name) {
  require_square(a, name);
  require_finite(a, name);
  if (a.rows() != space.dim()) {
    throw InvalidInput(std::string(name) + ": operator dimension " +
                       std::to_string(a.rows()) + " does not match the space (" +
                       std::to_string(space.dim()) + ")");
  }
}

// Runs the body over [0, n) in parallel or serially; exceptions inside the
// body are collapsed into one NumericalFailure after the loop (OpenMP
// regions must not leak exceptions).
template <typename Body>
void run_indexed(Index n, bool parallel, const char* what, Body&& body) {
  std::atomic<bool> failed{false};
  auto guarded = [&](Index i) {
    try {
      body(i);
    } catch (...) {
      failed.store(true);
    }
  };
  if (parallel) {
    parallel_for(n, guarded);
  } else {
    serial_for(n, guarded);
  }
  if (failed.load()) {
    throw NumericalFailure(std::string(what) + ": a grid evaluation failed");
  }
}

}  // namespace

const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StrictlyDissipative:
      return "strictly-dissipative";
    case StabilityClass::ExponentiallyStable:
      return "exponentially-stable";
    case StabilityClass::StronglyStableProbePassed:
      return "strongly-stable-probe-passed";
    case StabilityClass::Marginal:
      return "marginal";
    case StabilityClass::Unstable:
      return "unstable";
  }
  return "unknown";
}

StabilityVerdict assess_stability(const ComplexMatrix& a, const WeightedSpace& space,
                                  const AssessOptions& opts) {
  require_operator(a, space, "assess_stability.A");

  const double norm2 = operator_norm(a);
  const double re_tol =
      opts.re_tol.value_or(1e-8 * norm2 + std::numeric_limits<double>::min());
  const double tol = opts.class_tol.value_or(1e-10 * (1.0 + norm2));

  const auto dec = eig(a, re_tol);

  StabilityVerdict v;
  v.growth_bound = dec.report.max_real_part;
  v.abscissa = numerical_abscissa(a, space);
  v.strict_margin = std::max(0.0, -v.abscissa);
  for (Index idx : dec.report.peripheral) {
    v.peripheral_eigs.push_back(dec.report.eigenvalues[static_cast<std::size_t>(idx)]);
  }

  if (!opts.resolvent_grid.empty()) {
    for (const auto& sample : resolvent_norm_scan(a, space, opts.resolvent_grid)) {
      if (sample.singular) v.resolvent_unbounded = true;
      v.resolvent_sup = std::max(v.resolvent_sup, sample.norm);
    }
  }

  if (v.growth_bound > tol) {
    v.classification = StabilityClass::Unstable;
  } else if (v.abscissa <= -tol) {
    v.classification = StabilityClass::StrictlyDissipative;
  } else if (!v.peripheral_eigs.empty()) {
    v.classification = StabilityClass::Marginal;
  } else if (v.growth_bound <= -tol) {
    v.classification = opts.strong_stability_probe
                           ? StabilityClass::StronglyStableProbePassed
                           : StabilityClass::ExponentiallyStable;
  } else {
    v.classification = StabilityClass::Marginal;
  }
  return v;
}

std::vector<PeripheralMode> peripheral_point_spectrum(const ComplexMatrix& a,
                                                      double re_tol) {
  require_square(a, "peripheral_point_spectrum.A");
  require_finite(a, "peripheral_point_spectrum.A");
  if (!(re_tol > 0.0)) {
    throw InvalidInput("peripheral_point_spectrum: re_tol must be positive");
  }

  const auto dec = eig(a, re_tol);
  const double scale = a.norm();
  std::vector<PeripheralMode> out;
  out.reserve(dec.report.peripheral.size());
  for (Index idx : dec.report.peripheral) {
    PeripheralMode mode;
    mode.lambda = dec.report.eigenvalues[static_cast<std::size_t>(idx)];
    mode.vector = dec.vectors.col(idx);
    const double residual = (a * mode.vector - mode.lambda * mode.vector).norm();
    if (residual > 1e-10 * (scale + std::abs(mode.lambda)) +
                       std::numeric_limits<double>::min()) {
      throw NumericalFailure(
          "peripheral_point_spectrum: eigenvector residual above tolerance");
    }
    out.push_back(std::move(mode));
  }
  return out;
}

PairBuilder split_pair_builder(const ComplexMatrix& a21, const ComplexMatrix& s) {
  require_finite(a21, "split_pair_builder.a21");
  require_square(s, "split_pair_builder.s");
  require_finite(s, "split_pair_builder.s");
  if (s.rows() != a21.rows()) {
    throw InvalidInput("split_pair_builder: s and a21 row counts differ");
  }
  return [a21, s](const ComplexVector& v) {
    if (v.size() != a21.cols()) {
      throw InvalidInput("pair builder: eigenvector dimension mismatch");
    }
    ComplexVector z(v.size() + s.rows());
    z.head(v.size()) = v;
    z.tail(s.rows()) = s * (a21 * v);
    return z;
  };
}

InclusionVerdict check_peripheral_inclusion(const ComplexMatrix& a_s,
                                            const ComplexMatrix& a_ext,
                                            const PairBuilder& lift, double tol,
                                            std::optional<double> re_tol) {
  require_square(a_s, "check_peripheral_inclusion.a_s");
  require_square(a_ext, "check_peripheral_inclusion.a_ext");
  require_finite(a_ext, "check_peripheral_inclusion.a_ext");
  if (!(tol > 0.0)) {
    throw InvalidInput("check_peripheral_inclusion: tol must be positive");
  }
  if (!lift) throw InvalidInput("check_peripheral_inclusion: missing pair builder");

  const double band = re_tol.value_or(1e-8 * operator_norm(a_s) +
                                      std::numeric_limits<double>::min());
  InclusionVerdict verdict;
  for (const auto& mode : peripheral_point_spectrum(a_s, band)) {
    ComplexVector z = lift(mode.vector);
    if (z.size() != a_ext.rows()) {
      throw InvalidInput("check_peripheral_inclusion: witness dimension mismatch");
    }
    InclusionWitness w;
    w.lambda = mode.lambda;
    w.residual = (mode.lambda * z - a_ext * z).norm() / z.norm();
    w.ok = w.residual <= tol;
    w.witness = std::move(z);
    verdict.ok = verdict.ok && w.ok;
    verdict.witnesses.push_back(std::move(w));
  }
  return verdict;
}

ComplexMatrix kernel_intersection(const ComplexMatrix& a21, const ComplexMatrix& a11,
                                  double omega, double tol) {
  require_square(a11, "kernel_intersection.a11");
  require_finite(a11, "kernel_intersection.a11");
  require_finite(a21, "kernel_intersection.a21");
  if (!std::isfinite(omega)) {
    throw InvalidInput("kernel_intersection: omega must be finite");
  }
  const Index n = a11.rows();
  if (a21.cols() != n) {
    throw InvalidInput("kernel_intersection: a21 column count does not match a11");
  }
  ComplexMatrix stacked(a21.rows() + n, n);
  stacked.topRows(a21.rows()) = a21;
  stacked.bottomRows(n) =
      Complex(0.0, omega) * ComplexMatrix::Identity(n, n) - a11;
  return null_space(stacked, tol);
}

ComplexMatrix kernel_intersection(const ComplexMatrix& a21, const ComplexMatrix& a11,
                                  double omega, double tol, const WeightedSpace& space) {
  return w_orthonormalize(kernel_intersection(a21, a11, omega, tol), space);
}

double strict_dissipativity_margin(const ComplexMatrix& a, const WeightedSpace& space) {
  return std::max(0.0, -numerical_abscissa(a, space));
}

double thm39_condition1_margin(const ComplexMatrix& a_ext, const WeightedSpace& product,
                               Index n1) {
  require_operator(a_ext, product, "thm39_condition1_margin.a_ext");
  const Index n = a_ext.rows();
  if (n1 < 0 || n1 > n) {
    throw InvalidInput("thm39_condition1_margin: n1 out of range");
  }

  const ComplexMatrix wa = product.apply_weight(a_ext);
  const ComplexMatrix m = 0.5 * (wa + wa.adjoint());

  ComplexMatrix b = ComplexMatrix::Zero(n, n);
  if (product.is_diagonal()) {
    for (Index i = 0; i < n1; ++i) b(i, i) = product.diagonal()(i);
  } else {
    const ComplexMatrix w = product.weight();
    if (n1 > 0 && n1 < n && w.topRightCorner(n1, n - n1).norm() != 0.0) {
      throw InvalidInput(
          "thm39_condition1_margin: product weight is not block-diagonal at the split");
    }
    b.topLeftCorner(n1, n1) = w.topLeftCorner(n1, n1);
  }
  return largest_negative_shift(m, b);
}

double thm39_condition2_bound(const ComplexMatrix& a21, const ComplexMatrix& s,
                              const WeightedSpace& space1, const WeightedSpace& space2) {
  require_finite(a21, "thm39_condition2_bound.a21");
  if (a21.rows() != space2.dim() || a21.cols() != space1.dim()) {
    throw InvalidInput("thm39_condition2_bound: a21 does not map H1 to H2");
  }
  const double nu = coercivity_constant(s, space2);
  if (a21.cols() > a21.rows()) return 0.0;  // nontrivial kernel, not bounded below

  // Bounded-below constant between the weighted spaces: sigma_min of
  // L2^* a21 L1^{-*}.
  ComplexMatrix m = space2.apply_factor_adjoint(a21);
  m = space1.solve_factor(m.adjoint()).adjoint();
  const double c = smallest_singular_value(m);
  return nu * c * c;
}

namespace {

std::vector<ResolventSample> resolvent_scan_core(const ComplexMatrix& a,
                                                 const WeightedSpace* space,
                                                 const std::vector<double>& grid,
                                                 bool parallel) {
  require_square(a, "resolvent_norm_scan.A");
  require_finite(a, "resolvent_norm_scan.A");
  if (a.rows() == 0) throw InvalidInput("resolvent_norm_scan: empty operator");
  if (space && space->dim() != a.rows()) {
    throw InvalidInput("resolvent_norm_scan: operator does not match the space");
  }
  for (double w : grid) {
    if (!std::isfinite(w)) {
      throw InvalidInput("resolvent_norm_scan: nonfinite frequency in grid");
    }
  }

  const double scale = a.norm() + 1.0;
  std::vector<ResolventSample> out(grid.size());
  run_indexed(static_cast<Index>(grid.size()), parallel, "resolvent_norm_scan",
              [&](Index i) {
                const double omega = grid[static_cast<std::size_t>(i)];
                ComplexMatrix m = -a;
                m.diagonal().array() += Complex(0.0, omega);
                if (space && !space->is_identity()) {
                  m = space->apply_factor_adjoint(m);
                  m = space->solve_factor(m.adjoint()).adjoint();
                }
                const double sigma = smallest_singular_value(m);
                auto& slot = out[static_cast<std::size_t>(i)];
                slot.omega = omega;
                slot.singular = sigma <= 1e-12 * (scale + std::abs(omega));
                slot.norm = slot.singular ? kInf : 1.0 / sigma;
              });
  return out;
}

}  // namespace

std::vector<ResolventSample> resolvent_norm_scan(const ComplexMatrix& a,
                                                 const std::vector<double>& omega_grid) {
  return resolvent_scan_core(a, nullptr, omega_grid, true);
}

std::vector<ResolventSample> resolvent_norm_scan(const ComplexMatrix& a,
                                                 const WeightedSpace& space,
                                                 const std::vector<double>& omega_grid) {
  return resolvent_scan_core(a, &space, omega_grid, true);
}

std::vector<ResolventSample> resolvent_norm_scan_serial(
    const ComplexMatrix& a, const std::vector<double>& omega_grid) {
  return resolvent_scan_core(a, nullptr, omega_grid, false);
}

std::vector<ResolventSample> resolvent_norm_scan_serial(
    const ComplexMatrix& a, const WeightedSpace& space,
    const std::vector<double>& omega_grid) {
  return resolvent_scan_core(a, &space, omega_grid, false);
}

namespace {

std::vector<Complex> range_boundary_core(const ComplexMatrix& a,
                                         const WeightedSpace& space, Index angles,
                                         bool parallel) {
  require_operator(a, space, "numerical_range_boundary.A");
  if (angles < 3) {
    throw InvalidInput("numerical_range_boundary: need at least 3 angles");
  }
  if (a.rows() == 0) {
    throw InvalidInput("numerical_range_boundary: empty operator");
  }

  std::vector<Complex> points(static_cast<std::size_t>(angles));
  run_indexed(angles, parallel, "numerical_range_boundary", [&](Index j) {
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(angles);
    const ComplexMatrix rotated = std::polar(1.0, theta) * a;
    const ComplexMatrix wr = space.apply_weight(rotated);
    const ComplexMatrix m = 0.5 * (wr + wr.adjoint());
    const auto pencil = hermitian_pencil_eig(m, space, /*with_vectors=*/true);
    const ComplexVector v = pencil.vectors.col(pencil.vectors.cols() - 1);
    // v is W-normalized, so <Av, v>_W is the support point itself.
    points[static_cast<std::size_t>(j)] = space.inner(a * v, v);
  });
  return points;
}

}  // namespace

std::vector<Complex> numerical_range_boundary(const ComplexMatrix& a,
                                              const WeightedSpace& space, Index angles) {
  return range_boundary_core(a, space, angles, true);
}

std::vector<Complex> numerical_range_boundary_serial(const ComplexMatrix& a,
                                                     const WeightedSpace& space,
                                                     Index angles) {
  return range_boundary_core(a, space, angles, false);
}

bool positivity_probe(const ComplexMatrix& a, const std::vector<double>& t_list,
                      double tol) {
  require_square(a, "positivity_probe.A");
  require_finite(a, "positivity_probe.A");
  if (!(tol >= 0.0)) throw InvalidInput("positivity_probe: tol must be nonnegative");
  for (double t : t_list) {
    if (!(t > 0.0)) throw InvalidInput("positivity_probe: times must be positive");
  }
  for (double t : t_list) {
    const ComplexMatrix e = expm(t * a);
    if (e.real().minCoeff() < -tol) return false;
    if (e.imag().cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

std::optional<ComplexMatrix> limit_projection(const ComplexMatrix& a,
                                              const WeightedSpace& space,
                                              double gap_tol) {
  require_operator(a, space, "limit_projection.A");
  if (!(gap_tol > 0.0)) throw InvalidInput("limit_projection: gap_tol must be positive");
  if (numerical_abscissa(a, space) > 1e-8 * (1.0 + a.norm())) {
    throw InvalidInput("limit_projection: A is not W-dissipative");
  }

  const Index n = a.rows();
  const auto dec = eig(a);
  std::vector<Index> zero_modes;
  for (std::size_t i = 0; i < dec.report.eigenvalues.size(); ++i) {
    const Complex lambda = dec.report.eigenvalues[i];
    if (lambda.real() < -gap_tol) continue;
    if (std::abs(lambda) > gap_tol) return std::nullopt;  // nonzero peripheral mode
    zero_modes.push_back(static_cast<Index>(i));
  }
  if (zero_modes.empty()) return ComplexMatrix::Zero(n, n);

  ComplexMatrix basis(n, static_cast<Index>(zero_modes.size()));
  for (std::size_t k = 0; k < zero_modes.size(); ++k) {
    basis.col(static_cast<Index>(k)) = dec.vectors.col(zero_modes[k]);
  }
  const ComplexMatrix q = w_orthonormalize(basis, space);
  if (q.cols() != basis.cols()) {
    // Unreachable for dissipative A: peripheral eigenvalues are semisimple.
    throw NumericalFailure("limit_projection: defective zero eigenvalue");
  }
  return w_projection(q, space);
}

std::optional<Scheme> parse_scheme(const std::string& name) {
  if (name == "crank-nicolson") return Scheme::CrankNicolson;
  if (name == "backward-euler") return Scheme::BackwardEuler;
  if (name == "expm") return Scheme::Expm;
  return std::nullopt;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::CrankNicolson:
      return "crank-nicolson";
    case Scheme::BackwardEuler:
      return "backward-euler";
    case Scheme::Expm:
      return "expm";
  }
  return "unknown";
}

Trajectory propagate(const ComplexMatrix& a, const WeightedSpace& space,
                     const ComplexVector& x0, double t_end, double dt, Scheme scheme) {
  require_operator(a, space, "propagate.A");
  require_finite(x0, "propagate.x0");
  if (x0.size() != a.rows()) throw InvalidInput("propagate: x0 dimension mismatch");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput("propagate: dt must be positive");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw InvalidInput("propagate: t_end must be positive");
  }

  const Index steps = std::max<Index>(1, static_cast<Index>(std::llround(t_end / dt)));
  const double h = t_end / static_cast<double>(steps);
  const Index n = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.norms.reserve(static_cast<std::size_t>(steps) + 1);

  ComplexVector x = x0;
  traj.times.push_back(0.0);
  traj.norms.push_back(space.norm(x));

  auto record = [&](Index k) {
    traj.times.push_back(k == steps ? t_end : static_cast<double>(k) * h);
    traj.norms.push_back(space.norm(x));
  };

  switch (scheme) {
    case Scheme::CrankNicolson: {
      const ComplexMatrix m_minus = id - (0.5 * h) * a;
      const ComplexMatrix m_plus = id + (0.5 * h) * a;
      Eigen::PartialPivLU<ComplexMatrix> lu(m_minus);
      if (lu.rcond() < 1e-14) {
        throw NumericalFailure(
            "propagate: Crank-Nicolson step matrix is singular (dt*lambda = 2)");
      }
      for (Index k = 1; k <= steps; ++k) {
        x = lu.solve(m_plus * x);
        record(k);
      }
      break;
    }
    case Scheme::BackwardEuler: {
      const ComplexMatrix m = id - h * a;
      Eigen::PartialPivLU<ComplexMatrix> lu(m);
      if (lu.rcond() < 1e-14) {
        throw NumericalFailure(
            "propagate: backward Euler step matrix is singular (dt*lambda = 1)");
      }
      for (Index k = 1; k <= steps; ++k) {
        x = lu.solve(x);
        record(k);
      }
      break;
    }
    case Scheme::Expm: {
      const ComplexMatrix e = expm(h * a);
      for (Index k = 1; k <= steps; ++k) {
        x = e * x;
        record(k);
      }
      break;
    }
  }
  traj.final_state = std::move(x);
  return traj;
}

double decay_rate_fit(const Trajectory& traj, double window) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw InvalidInput("decay_rate_fit: window must lie in (0, 1]");
  }
  const std::size_t n = traj.times.size();
  if (n != traj.norms.size() || n < 2) {
    throw InvalidInput("decay_rate_fit: trajectory needs at least two samples");
  }

  std::size_t count = static_cast<std::size_t>(
      std::ceil(window * static_cast<double>(n)));
  count = std::min(n, std::max<std::size_t>(2, count));
  const std::size_t first = n - count;

  double mean_t = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    if (!(traj.norms[i] > 0.0)) {
      throw InvalidInput("decay_rate_fit: nonpositive norm inside the fit window");
    }
    mean_t += traj.times[i];
    mean_y += std::log(traj.norms[i]);
  }
  mean_t /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);

  double cov = 0.0;
  double var = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double dt = traj.times[i] - mean_t;
    cov += dt * (std::log(traj.norms[i]) - mean_y);
    var += dt * dt;
  }
  if (!(var > 0.0)) {
    throw InvalidInput("decay_rate_fit: fit window has no time spread");
  }
  return cov / var;
}

}  // namespace specstab
