#include "enn/transport.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "enn/data_fit.hpp"

namespace enn {
namespace {

FreeKnotSpline hat(double a, double b, double center, double half_width) {
  return FreeKnotSpline({a, center - half_width, center, center + half_width, b},
                        {0.0, 0.0, 1.0, 0.0, 0.0});
}

// Exact solution of u_t + u_x = 0 on (a, b) with inflow data g at x = a.
ScalarFunction translated(const ScalarFunction& u0, const ScalarFunction& g, double a,
                          double t) {
  return [=](double x) { return x - a >= t ? u0(x - t) : g(t - (x - a)); };
}

void expect_same_function(const FreeKnotSpline& p, const FreeKnotSpline& q, double tol) {
  ASSERT_EQ(p.a(), q.a());
  ASSERT_EQ(p.b(), q.b());
  for (double x : p.knots()) EXPECT_NEAR(p(x), q(x), tol) << "x=" << x;
  for (double x : q.knots()) EXPECT_NEAR(p(x), q(x), tol) << "x=" << x;
}

TEST(CharacteristicStep, MovesAtFluxSpeed) {
  const CharPoint p = characteristic_step({0.2, 0.1, 3.0}, 0.5, FluxModel::Linear(2.0));
  EXPECT_DOUBLE_EQ(p.position, 1.0);
  EXPECT_EQ(p.value, 3.0);
  const CharPoint q = characteristic_step({0.0, 0.0, -0.5}, 0.4, FluxModel::Burgers());
  EXPECT_DOUBLE_EQ(q.position, -0.2);
  EXPECT_EQ(q.value, -0.5);
}

TEST(AdvanceLinear, TranslatesHat) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline zero_g = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  const LinearEnnState s0 = make_linear_state(hat(-1.0, 1.0, 0.3, 0.1), zero_g, flux);
  const LinearEnnState s1 = advance_linear(s0, 0.2, zero_g, flux);
  EXPECT_DOUBLE_EQ(s1.t, 0.2);
  EXPECT_NEAR(s1.spline(0.5), 1.0, 1e-14);
  EXPECT_NEAR(s1.spline(0.4), 0.0, 1e-14);
  EXPECT_NEAR(s1.spline(0.6), 0.0, 1e-14);
  EXPECT_EQ(s1.spline.values().front(), 0.0);
  EXPECT_EQ(s1.spline.values().back(), 0.0);
  EXPECT_EQ(s1.spline.a(), -1.0);
  EXPECT_EQ(s1.spline.b(), 1.0);
}

TEST(AdvanceLinear, NegativeSpeedMovesLeft) {
  const FluxModel flux = FluxModel::Linear(-1.0);
  const FreeKnotSpline zero_g = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  const LinearEnnState s0 = make_linear_state(hat(-1.0, 1.0, 0.3, 0.1), zero_g, flux);
  const LinearEnnState s1 = advance_linear(s0, 0.2, zero_g, flux);
  EXPECT_NEAR(s1.spline(0.1), 1.0, 1e-14);
  EXPECT_NEAR(s1.spline(0.3), 0.0, 1e-14);
}

TEST(AdvanceLinear, ZeroSpeedIsIdentity) {
  const FluxModel flux = FluxModel::Linear(0.0);
  const FreeKnotSpline u0 = hat(0.0, 1.0, 0.5, 0.2);
  const LinearEnnState s1 = advance_linear(make_linear_state(u0, std::nullopt, flux), 0.7,
                                           std::nullopt, flux);
  EXPECT_EQ(s1.spline.knots(), u0.knots());
  EXPECT_EQ(s1.spline.values(), u0.values());
}

TEST(AdvanceLinear, InjectsBoundaryBreakpoint) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const double g1 = 0.75;
  const FreeKnotSpline g({0.0, 0.1, 1.0}, {0.0, g1, 0.0});
  const FreeKnotSpline u0 = FreeKnotSpline::Linear(-1.0, 1.0, 0.0, 0.0);
  const LinearEnnState s1 = advance_linear(make_linear_state(u0, g, flux), 0.3, g, flux);
  const auto& x = s1.spline.knots();
  const auto it = std::find_if(x.begin(), x.end(),
                               [](double v) { return std::abs(v - (-1.0 + 0.2)) < 1e-14; });
  ASSERT_NE(it, x.end());
  EXPECT_EQ(s1.spline.values()[static_cast<std::size_t>(it - x.begin())], g1);
  EXPECT_DOUBLE_EQ(s1.spline.values().front(), g(0.3));
}

TEST(AdvanceLinear, ZeroDataStaysZero) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline zero = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  LinearSetup setup{zero, zero, flux, 0.1};
  const RunResult r = run_linear(setup, {0.0, 0.5, 1.0});
  ASSERT_EQ(r.snapshots.size(), 3u);
  for (const Snapshot& s : r.snapshots) {
    for (double v : s.spline.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(AdvanceLinear, CornerMismatchIsShifted) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline u0 = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  const FreeKnotSpline g = FreeKnotSpline::Linear(0.0, 1.0, 1.0, 1.0);
  const LinearEnnState s0 = make_linear_state(u0, g, flux);
  EXPECT_TRUE(s0.corner_shift);
  const LinearEnnState s1 = advance_linear(s0, 0.5, g, flux);
  EXPECT_NEAR(s1.spline(0.25), 1.0, 1e-12);
  EXPECT_NEAR(s1.spline(0.75), 0.0, 1e-12);
  EXPECT_LE(s1.spline.integrate(), 0.5 + 1e-5);
  EXPECT_GE(s1.spline.integrate(), 0.5 - 1e-5);
}

TEST(RunLinear, StepCountDoesNotChangeResult) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline u0({0.0, 0.15, 0.3, 0.55, 0.7, 1.0}, {0.0, 0.4, -0.2, 1.0, 0.3, 0.1});
  const FreeKnotSpline g({0.0, 0.13, 0.31, 0.62, 1.0}, {0.0, 0.5, -0.1, 0.8, 0.2});
  const RunResult one = run_linear({u0, g, flux, 0.0}, {0.9});
  const RunResult ten = run_linear({u0, g, flux, 0.09}, {0.9});
  const RunResult odd = run_linear({u0, g, flux, 0.0371}, {0.9});
  ASSERT_EQ(one.trace.step_count(), 1u);
  ASSERT_EQ(ten.trace.step_count(), 10u);
  expect_same_function(one.snapshots.back().spline, ten.snapshots.back().spline, 1e-12);
  expect_same_function(one.snapshots.back().spline, odd.snapshots.back().spline, 1e-12);
}

TEST(RunLinear, ExactlyRepresentedDataIsTransportedExactly) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline u0 = hat(0.0, 1.0, 0.3, 0.1);
  const FreeKnotSpline g({0.0, 0.05, 0.1, 0.2, 0.5}, {0.0, 0.0, 1.0, 0.0, 0.0});
  const std::vector<double> times = {0.0, 0.125, 0.3, 0.5};
  const RunResult r = run_linear({u0, g, flux, 0.05}, times);
  ASSERT_EQ(r.snapshots.size(), times.size());
  for (const Snapshot& s : r.snapshots) {
    QuadratureOptions q;
    for (double x : {0.2, 0.3, 0.4}) q.breaks.push_back(x + s.t);
    for (double t : {0.05, 0.1, 0.2}) q.breaks.push_back(s.t - t);
    const LpError e = lp_error(s.spline, translated(u0.as_function(), g.as_function(), 0.0, s.t),
                               2.0, q);
    EXPECT_LE(e.absolute, 1e-10) << "t=" << s.t;
  }
}

TEST(RunLinear, ErrorStaysWithinFitBound) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const auto u0 = [](double x) { return std::cos(x); };
  const auto g = [](double t) { return std::cos(-t); };
  FitConfig cfg;
  cfg.epsilon = 3e-3;
  const FitResult fu = fit(u0, 0.0, 1.0, cfg);
  const FitResult fg = fit_boundary(g, 1.0, cfg);
  const double bound =
      cfg.epsilon * std::hypot(fu.target_norm, fg.target_norm) + 1e-8;
  const RunResult r = run_linear({fu.spline, fg.spline, flux, 0.1}, {0.25, 0.5, 0.75, 1.0});
  for (const Snapshot& s : r.snapshots) {
    const ScalarFunction exact = [&](double x) { return std::cos(x - s.t); };
    EXPECT_LE(lp_error(s.spline, exact).absolute, bound) << "t=" << s.t;
  }
}

TEST(RunLinear, BreakpointCountBounded) {
  const FluxModel flux = FluxModel::Linear(1.0);
  const FreeKnotSpline u0({0.0, 0.15, 0.3, 0.55, 0.7, 1.0}, {0.0, 0.4, -0.2, 1.0, 0.3, 0.1});
  const FreeKnotSpline g({0.0, 0.13, 0.31, 0.62, 1.0}, {0.0, 0.5, -0.1, 0.8, 0.2});
  const RunResult r = run_linear({u0, g, flux, 0.05}, {1.0});
  const std::size_t n0 = u0.interior_count();
  const std::size_t m = g.interior_count();
  ASSERT_EQ(r.trace.initial_breakpoints, n0);
  for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
    EXPECT_LE(r.trace.steps[k].breakpoints, n0 + m + 2 * (k + 2)) << "step " << k + 1;
  }
}

TEST(Reflect, MirrorsKnotsAndValues) {
  const FreeKnotSpline s({0.0, 0.2, 1.0}, {1.0, 2.0, 3.0});
  const FreeKnotSpline r = reflect(s);
  EXPECT_EQ(r.a(), 0.0);
  EXPECT_EQ(r.b(), 1.0);
  EXPECT_NEAR(r(0.8), 2.0, 1e-15);
  EXPECT_EQ(r.values().front(), 3.0);
}

}  // namespace
}  // namespace enn
