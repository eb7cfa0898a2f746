// SPDX-License-Identifier: Apache-2.0
#include "specstab/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "specstab/numkernel.hpp"
#include "specstab/stability.hpp"

namespace specstab {

namespace {

double interface_eps(const Grid1D& grid) {
  return 1e-12 * std::max(1.0, grid.b - grid.a);
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
  Index rows = 0;
  Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

WeightedSpace repeated_sum(const WeightedSpace& w, Index count) {
  WeightedSpace out = w;
  for (Index k = 1; k < count; ++k) out = direct_sum(out, w);
  return out;
}

ScalarCoefficient coefficient_or_one(const CoupledParabolicSpec& spec, Index k) {
  if (spec.coefficients.empty()) return [](double) { return Complex(1.0); };
  return spec.coefficients[static_cast<std::size_t>(k)];
}

ComplexMatrix sampled_elliptic(const CoupledParabolicSpec& spec, Index k,
                               SampleLocation where) {
  const ComplexMatrix s =
      sample_coefficient(coefficient_or_one(spec, k), spec.grid, where);
  for (Index i = 0; i < s.rows(); ++i) {
    if (!(s(i, i).real() > 0.0)) {
      throw InvalidInput("coupled spec: coefficient " + std::to_string(k) +
                         " loses ellipticity at sample " + std::to_string(i));
    }
  }
  return s;
}

ComplexMatrix potential_operator(const CoupledParabolicSpec& spec) {
  const Index n = spec.grid.n_nodes;
  const Index nc = spec.n_components;
  ComplexMatrix v_op = ComplexMatrix::Zero(nc * n, nc * n);
  for (Index i = 0; i < n; ++i) {
    const ComplexMatrix& m =
        spec.potential[piece_index_at(spec, spec.grid.node(i))].v;
    for (Index k = 0; k < nc; ++k) {
      for (Index l = 0; l < nc; ++l) {
        v_op(k * n + i, l * n + i) = m(k, l);
      }
    }
  }
  return v_op;
}

/// Null space of the stacked matrix with singular values judged against the
/// scale of the potential pieces. The stack itself can be numerically tiny
/// (all pieces nearly equal to i beta I) while the pieces are order one; a
/// tolerance relative to the stack alone would then miss the full kernel.
ComplexMatrix scaled_null_space(const ComplexMatrix& stacked, double piece_scale,
                                double tol) {
  const double smax = operator_norm(stacked);
  if (smax <= tol * piece_scale) {
    return ComplexMatrix::Identity(stacked.cols(), stacked.cols());
  }
  return null_space(stacked, std::max(kRankTol, tol * piece_scale / smax));
}

double potential_scale(const CoupledParabolicSpec& spec) {
  double scale = 1.0;
  for (const auto& piece : spec.potential) {
    scale = std::max(scale, 1.0 + piece.v.norm());
  }
  return scale;
}

/// Basis of { c in C^N : V_j c = 0 for every piece }, intersected by one
/// stacked null-space computation. Columns are orthonormal.
ComplexMatrix common_zero_kernel(const CoupledParabolicSpec& spec) {
  const Index nc = spec.n_components;
  ComplexMatrix stacked(nc * static_cast<Index>(spec.potential.size()), nc);
  for (std::size_t j = 0; j < spec.potential.size(); ++j) {
    stacked.block(static_cast<Index>(j) * nc, 0, nc, nc) = spec.potential[j].v;
  }
  return scaled_null_space(stacked, potential_scale(spec), kRankTol);
}

/// W-orthogonal projection onto constants tensor the common zero kernel.
/// Unlike predict_limit_projection this has no hypotheses; it is the
/// reference point the simulation report measures distances against.
ComplexMatrix zero_kernel_projection(const CoupledParabolicSpec& spec,
                                     const WeightedSpace& space) {
  const Index n = spec.grid.n_nodes;
  const Index nc = spec.n_components;
  const ComplexMatrix basis = common_zero_kernel(spec);
  if (basis.cols() == 0) return ComplexMatrix::Zero(nc * n, nc * n);
  ComplexMatrix lifted = ComplexMatrix::Zero(nc * n, basis.cols());
  for (Index col = 0; col < basis.cols(); ++col) {
    for (Index k = 0; k < nc; ++k) {
      lifted.block(k * n, col, n, 1).setConstant(basis(k, col));
    }
  }
  return w_projection(w_orthonormalize(lifted, space), space);
}

}  // namespace

void validate(const CoupledParabolicSpec& spec) {
  if (spec.n_components < 1) {
    throw InvalidInput("coupled spec: need at least one component");
  }
  validate(spec.grid, 3);
  if (!spec.coefficients.empty() &&
      static_cast<Index>(spec.coefficients.size()) != spec.n_components) {
    throw InvalidInput("coupled spec: coefficient count must match components");
  }
  if (spec.potential.empty()) {
    throw InvalidInput("coupled spec: potential needs at least one piece");
  }
  const double eps = interface_eps(spec.grid);
  double cursor = spec.grid.a;
  for (std::size_t j = 0; j < spec.potential.size(); ++j) {
    const auto& piece = spec.potential[j];
    require_shape(piece.v, spec.n_components, spec.n_components,
                  "potential piece");
    require_finite(piece.v, "potential piece");
    if (!std::isfinite(piece.lo) || !std::isfinite(piece.hi) ||
        piece.hi <= piece.lo) {
      throw InvalidInput("coupled spec: potential piece has an empty interval");
    }
    if (std::abs(piece.lo - cursor) > eps) {
      throw InvalidInput("coupled spec: potential pieces must partition the "
                         "interval without gaps or overlap");
    }
    cursor = piece.hi;
  }
  if (std::abs(cursor - spec.grid.b) > eps) {
    throw InvalidInput("coupled spec: potential pieces must end at the right "
                       "endpoint");
  }
}

std::size_t piece_index_at(const CoupledParabolicSpec& spec, double zeta) {
  const double eps = interface_eps(spec.grid);
  for (std::size_t j = 0; j + 1 < spec.potential.size(); ++j) {
    if (zeta <= spec.potential[j].hi + eps) return j;
  }
  return spec.potential.size() - 1;
}

CoupledOperator build_coupled_operator(const CoupledParabolicSpec& spec) {
  validate(spec);
  const Index nc = spec.n_components;
  const auto pair = staggered_gradient(spec.grid);

  CoupledOperator out;
  std::vector<ComplexMatrix> a21_blocks;
  std::vector<ComplexMatrix> a12_blocks;
  std::vector<ComplexMatrix> s_blocks;
  a21_blocks.reserve(static_cast<std::size_t>(nc));
  a12_blocks.reserve(static_cast<std::size_t>(nc));
  s_blocks.reserve(static_cast<std::size_t>(nc));

  if (spec.kind == CoupledKind::Heat) {
    const ComplexMatrix div =
        weighted_adjoint(pair.d_plus, pair.w_nodes, pair.w_cells);
    for (Index k = 0; k < nc; ++k) {
      a21_blocks.push_back(pair.d_plus);
      a12_blocks.push_back(-div);
      s_blocks.push_back(sampled_elliptic(spec, k, SampleLocation::Cells));
    }
    out.split.space2 = repeated_sum(pair.w_cells, nc);
  } else {
    const ComplexMatrix lap =
        -weighted_adjoint(pair.d_plus, pair.w_nodes, pair.w_cells) *
        pair.d_plus;
    for (Index k = 0; k < nc; ++k) {
      a21_blocks.push_back(lap);
      a12_blocks.push_back(-lap);
      s_blocks.push_back(sampled_elliptic(spec, k, SampleLocation::Nodes));
    }
    out.split.space2 = repeated_sum(pair.w_nodes, nc);
  }

  out.split.a21 = block_diag(a21_blocks);
  out.split.a12 = block_diag(a12_blocks);
  out.split.s = block_diag(s_blocks);
  out.split.a11 = potential_operator(spec);
  out.split.space1 = repeated_sum(pair.w_nodes, nc);
  out.space = out.split.space1;
  out.c = assemble_a_s(out.split);
  return out;
}

std::vector<bool> check_v_dissipative(const CoupledParabolicSpec& spec,
                                      double tol) {
  validate(spec);
  std::vector<bool> flags;
  flags.reserve(spec.potential.size());
  const auto space = WeightedSpace::identity(spec.n_components);
  for (const auto& piece : spec.potential) {
    const double abscissa = numerical_abscissa(piece.v, space);
    flags.push_back(abscissa <= tol * (1.0 + piece.v.norm()));
  }
  return flags;
}

VConditionVerdict check_v_condition(const CoupledParabolicSpec& spec,
                                    double tol) {
  validate(spec);
  if (!(tol > 0.0)) throw InvalidInput("check_v_condition: tol must be > 0");
  VConditionVerdict verdict;
  verdict.per_piece_dissipative = check_v_dissipative(spec, tol);

  const Index nc = spec.n_components;
  const ComplexMatrix& first = spec.potential.front().v;
  const double scale = tol * (1.0 + first.norm());

  // A common eigenvector at frequency beta is in particular an eigenvector
  // of the first piece, so i*beta must be one of its eigenvalues. That makes
  // the candidate set finite.
  std::vector<double> candidates;
  for (const Complex lambda : eig(first).report.eigenvalues) {
    if (std::abs(lambda.real()) > scale) continue;
    if (std::abs(lambda.imag()) <= scale) continue;  // beta = 0 is allowed
    const double beta = lambda.imag();
    const bool seen = std::any_of(
        candidates.begin(), candidates.end(),
        [&](double b) { return std::abs(b - beta) <= scale; });
    if (!seen) candidates.push_back(beta);
  }
  std::sort(candidates.begin(), candidates.end(), std::greater<>());

  for (const double beta : candidates) {
    const Index pieces = static_cast<Index>(spec.potential.size());
    ComplexMatrix stacked(pieces * nc, nc);
    for (Index j = 0; j < pieces; ++j) {
      stacked.block(j * nc, 0, nc, nc) =
          Complex(0.0, beta) * ComplexMatrix::Identity(nc, nc) -
          spec.potential[static_cast<std::size_t>(j)].v;
    }
    const ComplexMatrix kernel =
        scaled_null_space(stacked, potential_scale(spec), tol);
    if (kernel.cols() > 0) {
      verdict.holds = false;
      verdict.failing_beta = beta;
      verdict.witness = kernel.col(0);
      return verdict;
    }
  }
  verdict.holds = true;
  return verdict;
}

ComplexMatrix predict_limit_projection(const CoupledParabolicSpec& spec) {
  validate(spec);
  const auto verdict = check_v_condition(spec);
  if (!verdict.holds) {
    throw InvalidInput("predict_limit_projection: the potential pieces share "
                       "an oscillatory eigenvector; no limit exists");
  }
  for (std::size_t j = 0; j < verdict.per_piece_dissipative.size(); ++j) {
    if (!verdict.per_piece_dissipative[j]) {
      throw InvalidInput("predict_limit_projection: potential piece " +
                         std::to_string(j) + " is not dissipative");
    }
  }
  const auto pair = staggered_gradient(spec.grid);
  return zero_kernel_projection(spec,
                                repeated_sum(pair.w_nodes, spec.n_components));
}

SimulationComparison simulate_and_compare(const CoupledParabolicSpec& spec,
                                          double t_end, double dt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end) || !(dt > 0.0) ||
      !std::isfinite(dt)) {
    throw InvalidInput("simulate_and_compare: need t_end > 0 and dt > 0");
  }
  const auto op = build_coupled_operator(spec);
  const auto verdict = check_v_condition(spec);
  const bool all_dissipative =
      std::all_of(verdict.per_piece_dissipative.begin(),
                  verdict.per_piece_dissipative.end(), [](bool b) { return b; });

  SimulationComparison report;
  report.converging = verdict.holds && all_dissipative;

  const ComplexMatrix p = zero_kernel_projection(spec, op.space);

  const double peripheral_tol = 1e-10 * (1.0 + op.c.norm());
  double slowest = 0.0;
  bool any_damped = false;
  for (const Complex lambda : eig(op.c).report.eigenvalues) {
    if (lambda.real() < -peripheral_tol) {
      slowest = any_damped ? std::max(slowest, lambda.real()) : lambda.real();
      any_damped = true;
    }
  }
  report.spectral_gap = any_damped ? -slowest : 0.0;
  report.horizon = (report.converging && report.spectral_gap > 0.0)
                       ? 60.0 / report.spectral_gap
                       : t_end;
  if (report.converging) {
    report.expm_distance = operator_norm(expm(report.horizon * op.c) - p);
  }

  const Index n = spec.grid.n_nodes;
  const Index nc = spec.n_components;
  ComplexVector x0(nc * n);
  if (verdict.witness) {
    // Common eigenvector, spatially constant: an exact oscillatory mode.
    for (Index k = 0; k < nc; ++k) {
      x0.segment(k * n, n).setConstant((*verdict.witness)(k));
    }
  } else {
    for (Index k = 0; k < nc; ++k) {
      for (Index i = 0; i < n; ++i) {
        const double zeta = spec.grid.node(i);
        x0(k * n + i) =
            0.7 + std::cos(static_cast<double>(k + 1) * std::numbers::pi * zeta);
      }
    }
  }
  x0 /= op.space.norm(x0);
  report.probe_state = x0;

  const ComplexVector target = p * x0;
  const auto half = propagate(op.c, op.space, x0, 0.5 * t_end, dt,
                              Scheme::CrankNicolson);
  const auto full =
      propagate(op.c, op.space, x0, t_end, dt, Scheme::CrankNicolson);
  report.probe_times = {half.times.back(), full.times.back()};
  report.probe_distances = {op.space.norm(half.final_state - target),
                            op.space.norm(full.final_state - target)};
  const double base = full.norms.front();
  for (const double value : full.norms) {
    report.probe_norm_drift =
        std::max(report.probe_norm_drift, std::abs(value - base) / base);
  }
  return report;
}

}  // namespace specstab
