#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "sbvp/config.hpp"
#include "sbvp/errors.hpp"
#include "sbvp/grid.hpp"
#include "sbvp/model.hpp"
#include "sbvp/registry.hpp"

using namespace sbvp;
using sbvp::test::make_spec;

TEST(Grid, NodesAndWeights) {
  const Grid g(4);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_DOUBLE_EQ(g.point(3), 0.75);
  EXPECT_DOUBLE_EQ(g.weights()[0], 0.125);
  EXPECT_DOUBLE_EQ(g.weights()[2], 0.25);
  EXPECT_EQ(g.nearest(0.6), 2u);
  EXPECT_EQ(g.nearest(-1.0), 0u);
  EXPECT_EQ(g.nearest(3.0), 4u);
  EXPECT_THROW(Grid(0), DomainError);
}

TEST(Grid, TrapezoidIsExactForLinear) {
  const Grid g(7);
  const auto v = sample(g, [](double t) { return 3.0 * t - 1.0; });
  EXPECT_NEAR(trapezoid(g, v), 0.5, 1e-15);
  const auto c = cumulative_trapezoid(g, v);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double t = g.point(k);
    EXPECT_NEAR(c[k], 1.5 * t * t - t, 1e-15);
  }
}

TEST(Registry, DriftBuiltinsCarryDerivativesAndBounds) {
  const auto s = make_drift("sin_x(0.5)");
  EXPECT_DOUBLE_EQ(s.fn(0.3, 1.0), 0.5 * std::sin(1.0));
  EXPECT_DOUBLE_EQ(s.dx(0.3, 1.0), 0.5 * std::cos(1.0));
  EXPECT_DOUBLE_EQ(s.sup_abs, 0.5);
  EXPECT_DOUBLE_EQ(s.sup_abs_dx, 0.5);

  const auto t = make_drift("sin_txo(0.2, 3)");
  EXPECT_DOUBLE_EQ(t.fn(0.5, 2.0), 0.2 * std::sin(3.0));
  EXPECT_DOUBLE_EQ(t.dx(0.5, 2.0), 0.2 * 1.5 * std::cos(3.0));

  const auto p = make_drift("poly(1, 2, 3)");
  EXPECT_DOUBLE_EQ(p.fn(0.0, 2.0), 17.0);
  EXPECT_DOUBLE_EQ(p.dx(0.0, 2.0), 14.0);
  EXPECT_TRUE(std::isinf(p.sup_abs));

  const auto c = make_drift("constant(-0.25)");
  EXPECT_DOUBLE_EQ(c.sup_abs, 0.25);
  EXPECT_DOUBLE_EQ(c.sup_abs_dx, 0.0);
}

TEST(Registry, TimeBuiltins) {
  EXPECT_DOUBLE_EQ(make_time_function("poly(0, 1)").fn(0.3), 0.3);
  EXPECT_DOUBLE_EQ(make_time_function("constant(2)").fn(0.9), 2.0);
  EXPECT_DOUBLE_EQ(make_time_function("zero").fn(0.1), 0.0);
}

TEST(Registry, RejectsMalformedExpressions) {
  for (const char* bad : {"", "sin_x(", "sin_x(a)", "sin_x(1,)", "nope(1)", "constant()"}) {
    EXPECT_THROW(make_drift(bad), ConfigError) << bad;
  }
}

TEST(Model, ValidSpecPasses) {
  const auto spec = make_spec(BoundaryKind::SecondKind, 1.0, "sin_x(0.5)", "constant(1)", "constant(0.5)");
  const auto report = validate_spec(spec);
  EXPECT_TRUE(report.ok());
  EXPECT_LE(report.sup_B.measured, 0.5);
  EXPECT_NO_THROW(require_valid(spec));
}

TEST(Model, BetaNotBelowPIsRejected) {
  auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "sin_x(1.5)", "zero", "zero");
  try {
    validate_spec(spec);
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.code(), "condition_c2_violated");
  }
}

TEST(Model, NonPositivePIsRejected) {
  auto spec = make_spec(BoundaryKind::FirstKind, 0.0, "zero", "zero", "zero");
  try {
    validate_spec(spec);
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.code(), "invalid_p");
  }
}

TEST(Model, UnderstatedBoundsAreCaughtOnTheLattice) {
  auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "sin_x(0.5)", "zero", "zero");
  spec.beta_star = 0.1;
  EXPECT_FALSE(validate_spec(spec).sup_B.passed);
  try {
    require_valid(spec);
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.code(), "condition_c1_violated");
  }
}

TEST(Model, WrongDerivativeIsCaught) {
  auto spec = make_spec(BoundaryKind::FirstKind, 1.0, "sin_x(0.5)", "zero", "zero");
  spec.B_x = [](double, double x) { return 0.5 * std::sin(x); };
  EXPECT_FALSE(validate_spec(spec).derivative_matches.passed);
}

TEST(Model, BoundaryKindNames) {
  EXPECT_EQ(parse_boundary_kind("periodic"), BoundaryKind::Periodic);
  EXPECT_EQ(to_string(BoundaryKind::SecondKind), "second");
  EXPECT_THROW(parse_boundary_kind("dirichlet"), ConfigError);
}

TEST(Config, ParsesProblemAndRun) {
  const auto cfg = parse_config(R"toml(
[problem]
p = 2.0
boundary = "periodic"
B = "sin_x(0.5)"
f = "constant(1)"
delta = "constant(0.5)"
beta = 0.75

[run]
n = 256
ladder = [0.1, 0.01]
paths = 10
seed = 42
)toml");
  EXPECT_DOUBLE_EQ(cfg.problem.p, 2.0);
  EXPECT_EQ(cfg.problem.boundary, BoundaryKind::Periodic);
  EXPECT_EQ(cfg.run.n, 256u);
  EXPECT_EQ(cfg.run.ladder.size(), 2u);
  EXPECT_EQ(cfg.run.seed, 42u);
  const auto spec = build_spec(cfg.problem);
  EXPECT_DOUBLE_EQ(spec.beta_star, 0.5);
  EXPECT_DOUBLE_EQ(spec.beta, 0.75);
}

TEST(Config, ErrorsCarryCodes) {
  try {
    load_config("/nonexistent/problem.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), "config_not_found");
  }
  for (const char* text : {"[problem\np = 1", "[problem]\nq = 1", "[problem]\np = \"x\"",
                           "[run]\nn = 4"}) {
    try {
      parse_config(text);
      FAIL() << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.code(), "config_parse_error") << text;
    }
  }
}
