#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "sbvp/errors.hpp"
#include "sbvp/experiments.hpp"
#include "sbvp/solver.hpp"

using namespace sbvp;
using sbvp::test::make_spec;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

BrownianPath quiet_path(std::size_t n) { return BrownianPath(Grid(n), std::vector<double>(n, 0.0), 0); }

}  // namespace

TEST(ForcingPath, ZeroInputsGiveZero) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "zero", "zero");
  for (double v : forcing_path(spec, 0.1, sample_path(64, 1))) EXPECT_EQ(v, 0.0);
}

TEST(ForcingPath, SecondKindConstantForcing) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 2.0, "zero", "constant(1)", "zero");
  for (double v : forcing_path(spec, 1e-3, quiet_path(256))) EXPECT_NEAR(v, -0.5, 1e-3);
}

TEST(ForcingPath, FirstKindScaledForcing) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "constant(1)", "zero");
  const double eps = 1e-3;
  const auto phi = forcing_path(spec, eps, quiet_path(256));
  const Grid grid(256);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double t = grid.point(i);
    EXPECT_NEAR(phi[i] / (eps * eps), -t * (1 - t) / 2, 1e-3);
  }
}

TEST(ContractionBound, Examples) {
  const Grid grid(256);
  EXPECT_EQ(contraction_bound(make_spec(BoundaryKind::FirstKind, 1.0, "zero", "zero", "zero"), 0.5, grid), 0.0);
  auto s2 = make_spec(BoundaryKind::SecondKind, 2.0, "sin_x(1)", "zero", "zero");
  EXPECT_NEAR(contraction_bound(s2, 1e-3, grid), 0.5, 1e-3);
  auto s1 = make_spec(BoundaryKind::FirstKind, 2.0, "sin_x(1)", "zero", "zero");
  EXPECT_NEAR(contraction_bound(s1, 1e-3, grid), 1e-6 / 4, 1e-9);
}

TEST(PicardSolve, AffineProblemConvergesInOneIteration) {
  const auto spec = make_spec(BoundaryKind::Periodic, 1.0, "zero", "poly(0, 1)", "constant(1)");
  const auto path = sample_path(128, 2);
  const auto sol = picard_solve(spec, 0.2, path);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_EQ(sup_diff(sol.x, forcing_path(spec, 0.2, path)), 0.0);
}

TEST(PicardSolve, SecondKindConstantSolutionIsExact) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 2.0, "zero", "constant(3)", "zero");
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto sol = picard_solve(spec, eps, quiet_path(1024));
    for (double v : sol.x) EXPECT_NEAR(v, -1.5, 1e-8) << eps;
    for (double v : sol.xdot) EXPECT_NEAR(v, 0.0, 1e-8) << eps;
  }
}

TEST(PicardSolve, DirichletCoshOracle) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "constant(1)", "zero");
  const double eps = 0.5;
  const auto sol = picard_solve(spec, eps, quiet_path(1024));
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    const double t = sol.grid.point(i);
    EXPECT_NEAR(sol.x[i], std::cosh(eps * (t - 0.5)) / std::cosh(eps / 2) - 1, 1e-6);
    EXPECT_NEAR(sol.xdot[i], eps * std::sinh(eps * (t - 0.5)) / std::cosh(eps / 2), 1e-6);
  }
}

TEST(PicardSolve, NonlinearDiagnostics) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto path = sample_path(512, 3);
  const KernelOperator op(spec.boundary, 0.1, spec.p, path.grid());
  const auto sol = picard_solve(op, spec, path);
  EXPECT_TRUE(sol.converged);
  EXPECT_GT(sol.iterations, 5);
  EXPECT_LE(sol.theta_est, sol.contraction_bound + 0.05);
  EXPECT_LT(sol.final_residual, 1e-10 * (1 - sol.contraction_bound));
  const double bound = 1e-10 * (1 - sol.theta_est) / std::max(sol.theta_est, 1e-3);
  EXPECT_LE(sol.final_residual, bound);
  for (std::size_t k = 2; k < sol.update_norms.size(); ++k) {
    EXPECT_LE(sol.update_norms[k] / sol.update_norms[k - 1], sol.contraction_bound + 0.05) << k;
  }
}

TEST(PicardSolve, DistinctStartsReachTheSameFixedPoint) {
  const auto spec = make_spec(BoundaryKind::Periodic, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto path = sample_path(512, 4);
  const KernelOperator op(spec.boundary, 0.1, spec.p, path.grid());
  SolveOptions a;
  SolveOptions b;
  b.initial_offset = 1.0;
  const auto x0 = picard_solve(op, spec, path, a);
  const auto x1 = picard_solve(op, spec, path, b);
  EXPECT_GT(x1.iterations, x0.iterations);
  EXPECT_LE(sup_diff(x0.x, x1.x), 2 * a.tol / (1 - x0.contraction_bound));
}

TEST(PicardSolve, BatchMatchesSinglePathBitForBit) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(1)");
  const auto paths = coupled_paths(256, 37, 10);
  const KernelOperator op(spec.boundary, 0.5, spec.p, Grid(256));
  const auto batch = picard_solve_batch(op, spec, paths);
  for (std::size_t m = 0; m < paths.size(); m += 9) {
    const auto one = picard_solve(op, spec, paths[m]);
    EXPECT_EQ(one.iterations, batch[m].iterations);
    EXPECT_EQ(sup_diff(one.x, batch[m].x), 0.0);
    EXPECT_EQ(sup_diff(one.xdot, batch[m].xdot), 0.0);
  }
}

TEST(PicardSolve, LargeBoundIsRefused) {
  auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.99)", "zero", "zero");
  try {
    picard_solve(spec, 0.5, quiet_path(64));
    FAIL();
  } catch (const NoContraction& e) {
    EXPECT_EQ(e.code(), "no_contraction");
    EXPECT_GT(e.bound(), 0.95);
  }
}

TEST(PicardSolve, IterationCapIsReported) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "constant(1)", "zero");
  try {
    picard_solve(spec, 0.1, quiet_path(64), 1e-10, 3);
    FAIL();
  } catch (const MaxIterExceeded& e) {
    EXPECT_EQ(e.code(), "max_iter_exceeded");
  }
}

TEST(PicardSolve, BoundaryConditionsHold) {
  const std::size_t n = 512;
  const double h = 1.0 / n;
  const double bc_tol = std::max(10 * h * h, 1e-8);
  for (auto kind : {BoundaryKind::FirstKind, BoundaryKind::SecondKind, BoundaryKind::Periodic}) {
    const auto spec = make_spec(kind, 1.0, "sin_txo(0.5, 1)", "poly(0, 1)", "zero");
    const auto sol = picard_solve(spec, 0.3, quiet_path(n));
    const auto [a, b] = boundary_residual(kind, sol);
    EXPECT_LE(a, bc_tol) << to_string(kind);
    EXPECT_LE(b, bc_tol) << to_string(kind);
  }
}

TEST(B0, InverseExamples) {
  const auto zero = make_spec(BoundaryKind::SecondKind, 1.0, "zero", "zero", "zero");
  EXPECT_NEAR(invert_B0(zero, 0.7), 0.7, 1e-12);
  const auto c = make_spec(BoundaryKind::SecondKind, 2.0, "constant(0.6)", "zero", "zero");
  EXPECT_NEAR(invert_B0(c, 1.0), 1.0 - 0.3, 1e-12);
  const auto s = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "zero", "zero");
  EXPECT_NEAR(invert_B0(s, 0.0), 0.0, 1e-12);
  // Root of x + 0.5 sin x = 1 from a 40-digit reference solve.
  EXPECT_NEAR(invert_B0(s, 1.0), 0.6840366566778294, 1e-12);
}

TEST(B0, RoundTripAndMonotoneOnLattice) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_txo(0.5, 2)", "zero", "zero");
  const B0Function b0(spec);
  double prev_x = 0, prev_v = 0;
  for (int k = 0; k <= 100; ++k) {
    const double x = -10.0 + 0.2 * k;
    const double v = b0(x);
    EXPECT_NEAR(invert_B0(b0, v), x, 1e-10);
    if (k > 0) EXPECT_GE(v - prev_v, (1 - spec.beta / spec.p) * (x - prev_x) - 1e-14);
    EXPECT_GE(b0.derivative(x), 1 - spec.beta / spec.p);
    prev_x = x;
    prev_v = v;
  }
}

TEST(B0, MisdeclaredBoundBreaksBracket) {
  auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "constant(0.8)", "zero", "zero");
  spec.beta_star = 0.1;
  EXPECT_THROW(invert_B0(spec, 0.0), BracketFailure);
}

TEST(VerifySde, ConstantSolutionHasNoResidual) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 2.0, "zero", "constant(1)", "zero");
  const auto path = quiet_path(512);
  const auto r = verify_sde(spec, 0.1, path, picard_solve(spec, 0.1, path));
  EXPECT_LT(r.max_residual, 1e-8);
}

TEST(VerifySde, ZeroProblemIsExact) {
  const auto spec = make_spec(BoundaryKind::Periodic, 1.0, "zero", "zero", "zero");
  const auto path = sample_path(128, 1);
  EXPECT_EQ(verify_sde(spec, 0.3, path, picard_solve(spec, 0.3, path)).max_residual, 0.0);
}

// The differentiated-kernel scheme is consistent to second order, so the
// residual drops by about four per halving of h.
TEST(VerifySde, ResidualRefinesWithTheGrid) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(1)");
  const auto fine = sample_path(1024, 5);
  const auto coarse = fine.coarsen(2);
  const double eps = 0.5;
  const double r1 = verify_sde(spec, eps, coarse, picard_solve(spec, eps, coarse)).max_residual;
  const double r2 = verify_sde(spec, eps, fine, picard_solve(spec, eps, fine)).max_residual;
  EXPECT_GT(r1, r2);
  EXPECT_NEAR(r1 / r2, 4.0, 1.2);
}
