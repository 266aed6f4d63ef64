#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "sbvp/grid.hpp"

namespace sbvp {

/// Boundary conditions of the second-order problem.
///
///   FirstKind   x(0) = x(1) = 0
///   SecondKind  x'(0) = x'(1) = 0
///   Periodic    x(0) = x(1), x'(0) = x'(1)
///
/// The names follow the source literature, which calls both of the first two
/// "Neumann" conditions even though FirstKind is a Dirichlet condition.
enum class BoundaryKind { FirstKind, SecondKind, Periodic };

/// "first" | "second" | "periodic".
std::string_view to_string(BoundaryKind kind) noexcept;
BoundaryKind parse_boundary_kind(std::string_view name);

using TimeFunction = std::function<double(double)>;
using DriftFunction = std::function<double(double, double)>;

/// Problem instance for
///
///   d x'(t) = eps^2 (p x + B(t, x) + f(t)) dt + eps^2 delta(t) dW_t
///
/// on [0,1] with one of the boundary kinds. Function handles must be pure and
/// re-entrant; they are called concurrently from worker threads.
struct ProblemSpec {
  double p = 1.0;
  DriftFunction B;
  DriftFunction B_x;
  TimeFunction f;
  TimeFunction delta;
  double beta_star = 0.0;  ///< declared sup |B|
  double beta = 0.0;       ///< declared sup |B_x|; must be < p
  BoundaryKind boundary = BoundaryKind::FirstKind;
};

/// Squared L2 norm of delta over [0,1] by trapezoid on `grid`.
double delta_norm_squared(const ProblemSpec& spec, const Grid& grid);

struct LatticeOptions {
  std::size_t nt = 101;
  std::size_t nx = 201;
  double x_range = 10.0;
  double fd_step = 1e-6;
  double fd_rel_tol = 1e-4;
};

struct ConditionCheck {
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

/// Spot checks of the structural conditions on a finite (t, x) lattice over
/// [0,1] x [-x_range, x_range]. Uniform continuity of B_x is assumed, not
/// checked.
struct ValidationReport {
  ConditionCheck beta_below_p;        ///< (a) declared beta < p
  ConditionCheck sup_B;               ///< (b) lattice max |B| <= beta_star
  ConditionCheck sup_B_x;             ///< (c) lattice max |B_x| <= beta, and < p
  ConditionCheck derivative_matches;  ///< (d) B_x vs central differences of B

  bool ok() const noexcept {
    return beta_below_p.passed && sup_B.passed && sup_B_x.passed && derivative_matches.passed;
  }
};

/// Throws SpecError("invalid_p") for p <= 0 and SpecError("condition_c2_violated")
/// when the declared beta is not below p. Lattice failures are reported.
ValidationReport validate_spec(const ProblemSpec& spec, const LatticeOptions& lattice = {});

/// validate_spec plus a throw for the first failing lattice check.
void require_valid(const ProblemSpec& spec, const LatticeOptions& lattice = {});

}  // namespace sbvp
