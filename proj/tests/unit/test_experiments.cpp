#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "sbvp/errors.hpp"
#include "sbvp/experiments.hpp"
#include "sbvp/parallel.hpp"

using namespace sbvp;
using sbvp::test::make_spec;

namespace {
const std::vector<double> kLadder{1e-1, 1e-2, 1e-3};
}

TEST(Quantile, NearestRank) {
  EXPECT_EQ(quantile({5, 1, 4, 2, 3}, 0.5), 3);
  EXPECT_EQ(quantile({1, 2, 3, 4}, 0.5), 2);
  EXPECT_EQ(quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9), 9);
  EXPECT_EQ(quantile({7}, 0.9), 7);
  EXPECT_THROW(quantile({}, 0.5), DomainError);
  EXPECT_THROW(quantile({1}, 0.0), DomainError);
}

TEST(ConvergeFirstKind, DeterministicErrorsDecrease) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "constant(1)", "zero");
  const auto table = converge_first_kind(spec, kLadder, 1, 512, 1);
  ASSERT_EQ(table.cells.size(), 3u);
  EXPECT_GT(table.cells[0].sup_err, table.cells[1].sup_err);
  EXPECT_GT(table.cells[1].sup_err, table.cells[2].sup_err);
  EXPECT_LT(table.cells[2].sup_err, 1e-2);
  EXPECT_EQ(table.eps0, 1e-1);
}

TEST(ConvergeFirstKind, StochasticMediansDecrease) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "constant(1)", "constant(1)");
  const auto table = converge_first_kind(spec, kLadder, 200, 256, 1);
  EXPECT_TRUE(table.median_strictly_decreasing());
  for (const auto& s : table.summaries) {
    EXPECT_EQ(s.succeeded, 200u);
    EXPECT_LE(s.median, s.p90);
  }
}

TEST(ConvergeFirstKind, ErrorIsConvergedInTheGrid) {
  const auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "zero", "constant(1)", "constant(1)");
  const std::vector<double> eps{1e-1};
  const auto fine = coupled_paths(1024, 5, 3);
  std::vector<BrownianPath> coarse;
  for (const auto& p : fine) coarse.push_back(p.coarsen(2));
  const auto a = converge_first_kind(spec, eps, coarse);
  const auto b = converge_first_kind(spec, eps, fine);
  for (std::size_t m = 0; m < fine.size(); ++m) {
    EXPECT_NEAR(a.cells[m].sup_err, b.cells[m].sup_err, 1e-5);
  }
}

TEST(ConvergeConstant, ExactConstantSolutionMatchesLimit) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 2.0, "zero", "constant(1)", "zero");
  const auto table = converge_constant(spec, kLadder, 2, 512, 1);
  for (const auto& c : table.cells) EXPECT_LT(c.sup_err, 1e-8);
}

TEST(ConvergeConstant, NonlinearErrorsDecrease) {
  for (auto kind : {BoundaryKind::SecondKind, BoundaryKind::Periodic}) {
    const auto spec = make_spec(kind, 1.0, "sin_x(0.5)", "constant(1)", "zero");
    const auto table = converge_constant(spec, kLadder, 1, 512, 1);
    EXPECT_GT(table.cells[0].sup_err, table.cells[1].sup_err);
    EXPECT_GT(table.cells[1].sup_err, table.cells[2].sup_err);
  }
}

TEST(ConvergeConstant, KindsShareTheirLimit) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto paths = coupled_paths(256, 20, 1);
  const auto gap = kind_gap(spec, kLadder, paths);
  ASSERT_EQ(gap.size(), 3u);
  EXPECT_GT(gap[0], gap[1]);
  EXPECT_GT(gap[1], gap[2]);
}

TEST(Converge, TablesAreReproducibleAcrossThreadCounts) {
  const auto spec = make_spec(BoundaryKind::Periodic, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto before = thread_count();
  set_thread_count(1);
  const auto a = converge(spec, kLadder, 40, 128, 7);
  set_thread_count(3);
  const auto b = converge(spec, kLadder, 40, 128, 7);
  set_thread_count(before);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    EXPECT_EQ(a.cells[k].sup_err, b.cells[k].sup_err);
    EXPECT_EQ(a.cells[k].seed, b.cells[k].seed);
  }
}

TEST(Converge, FailedCellsAreRecorded) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "zero", "zero");
  // max |eps^2 G| ~ eps coth(eps) at eps = 2, so the bound there is ~1.04.
  const std::vector<double> ladder{2.0, 1e-2};
  const auto table = converge_constant(spec, ladder, 3, 64, 1);
  EXPECT_TRUE(table.cells[0].failed);
  EXPECT_EQ(table.cells[0].error, "no_contraction");
  EXPECT_FALSE(table.cells[3].failed);
  EXPECT_EQ(table.summaries[0].failed, 3u);
  EXPECT_EQ(table.eps0, 1e-2);
}

TEST(Converge, RejectsBadLadders) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "zero", "zero", "zero");
  const std::vector<double> up{1e-3, 1e-2};
  EXPECT_THROW(converge_constant(spec, up, 1, 64, 1), DomainError);
  EXPECT_THROW(converge_first_kind(spec, kLadder, 1, 64, 1), DomainError);
}

TEST(DeterministicLimit, ConstantForcingIsExact) {
  const auto rows = deterministic_limit_check(2.0, make_time_function("constant(1)").fn, kLadder, 512);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.limit, -0.5);
    EXPECT_LT(r.error, 1e-8);
  }
}

TEST(DeterministicLimit, LinearForcingConverges) {
  const auto rows = deterministic_limit_check(1.0, make_time_function("poly(0, 1)").fn, kLadder, 1024);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_DOUBLE_EQ(rows[k].limit, -0.5);
    if (k % 3 != 0) EXPECT_LT(rows[k].error, rows[k - 1].error);
    if (k % 3 == 2) EXPECT_LT(rows[k].error, 1e-3);
  }
}

TEST(DeterministicLimit, ZeroForcingGivesZero) {
  for (const auto& r : deterministic_limit_check(1.0, make_time_function("zero").fn, kLadder, 64)) {
    EXPECT_EQ(r.error, 0.0);
  }
}

TEST(DecompositionIdentity, HoldsWhenDriftIsStateFree) {
  const auto c = make_spec(BoundaryKind::SecondKind, 2.0, "zero", "constant(1)", "zero");
  const auto quiet = BrownianPath(Grid(256), std::vector<double>(256, 0.0), 0);
  EXPECT_LT(decomposition_identity_check(c, 0.1, quiet, picard_solve(c, 0.1, quiet)), 1e-8);

  const auto noisy = make_spec(BoundaryKind::Periodic, 1.0, "constant(0.3)", "poly(0, 1)", "constant(1)");
  const auto path = sample_path(256, 2);
  EXPECT_LT(decomposition_identity_check(noisy, 0.1, path, picard_solve(noisy, 0.1, path)), 1e-12);

  const auto zero = make_spec(BoundaryKind::Periodic, 1.0, "zero", "zero", "zero");
  EXPECT_EQ(decomposition_identity_check(zero, 0.1, path, picard_solve(zero, 0.1, path)), 0.0);
}

TEST(DecompositionIdentity, StateDriftResidualVanishesWithEps) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto path = sample_path(256, 3);
  double prev = INFINITY;
  for (double eps : kLadder) {
    const double r = decomposition_identity_check(spec, eps, path, picard_solve(spec, eps, path));
    EXPECT_LT(r, prev);
    prev = r;
  }
}
