#include "enn/spline.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "enn/flux.hpp"

namespace enn {
namespace {

FreeKnotSpline random_spline(std::mt19937& rng, int interior, double a, double b) {
  std::uniform_real_distribution<double> pos(a, b);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<double> x = {a, b};
  for (int i = 0; i < interior; ++i) x.push_back(pos(rng));
  std::sort(x.begin(), x.end());
  std::vector<double> u;
  for (std::size_t i = 0; i < x.size(); ++i) u.push_back(val(rng));
  return FreeKnotSpline(x, u);
}

// Composite Simpson with many panels.
double simpson(const ScalarFunction& f, double a, double b, int panels = 200000) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

TEST(FreeKnotSpline, EvaluatesAffineInterpolation) {
  FreeKnotSpline s({0.0, 1.0}, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(s(0.5), 1.0);
  FreeKnotSpline hat({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(hat(0.25), 0.5);
}

TEST(FreeKnotSpline, ReturnsStoredValueAtEveryKnot) {
  std::mt19937 rng(7);
  const FreeKnotSpline s = random_spline(rng, 30, -1.0, 2.0);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s(s.knots()[i]), s.values()[i]);
}

TEST(FreeKnotSpline, RejectsPointsOutsideInterval) {
  FreeKnotSpline s({0.0, 1.0}, {0.0, 2.0});
  EXPECT_THROW(s(-1e-9), DomainError);
  EXPECT_THROW(s(1.0 + 1e-9), DomainError);
  EXPECT_DOUBLE_EQ(s.clamped(5.0), 2.0);
}

TEST(FreeKnotSpline, RejectsMalformedInput) {
  EXPECT_THROW(FreeKnotSpline({0.0, 1.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(FreeKnotSpline({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(FreeKnotSpline({0.0}, {0.0}), std::invalid_argument);
}

TEST(FreeKnotSpline, MergesNearCoincidentInteriorKnots) {
  FreeKnotSpline s({0.0, 0.5, 0.5 + 1e-14, 1.0}, {0.0, 1.0, 3.0, 0.0});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.values()[1], 2.0, 1e-15);
  EXPECT_EQ(s.a(), 0.0);
  EXPECT_EQ(s.b(), 1.0);
}

TEST(FreeKnotSpline, StaysWithinBracketingValues) {
  std::mt19937 rng(11);
  const FreeKnotSpline s = random_spline(rng, 20, 0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = pos(rng);
    const std::size_t c = s.cell_of(x);
    const double lo = std::min(s.values()[c], s.values()[c + 1]);
    const double hi = std::max(s.values()[c], s.values()[c + 1]);
    EXPECT_GE(s(x), lo - 1e-15);
    EXPECT_LE(s(x), hi + 1e-15);
  }
}

TEST(ReluForm, HatHasSlopeJumpCoefficients) {
  FreeKnotSpline hat({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  const ReluForm r = to_relu_form(hat);
  EXPECT_DOUBLE_EQ(r.bias, 0.0);
  ASSERT_EQ(r.coefficients.size(), 2u);
  EXPECT_DOUBLE_EQ(r.coefficients[0], 2.0);
  EXPECT_DOUBLE_EQ(r.coefficients[1], -4.0);
  EXPECT_DOUBLE_EQ(r(0.25), 0.5);
}

TEST(ReluForm, ConstantHasOnlyBias) {
  FreeKnotSpline c({0.0, 0.3, 1.0}, {3.0, 3.0, 3.0});
  const ReluForm r = to_relu_form(c);
  EXPECT_DOUBLE_EQ(r.bias, 3.0);
  for (double ci : r.coefficients) EXPECT_DOUBLE_EQ(ci, 0.0);
}

// Knots jittered around a uniform grid, so cells stay at least a fifth of
// the grid spacing wide.
FreeKnotSpline jittered_spline(std::mt19937& rng, int interior, double a, double b) {
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const double h = (b - a) / (interior + 1);
  std::vector<double> x = {a};
  for (int i = 1; i <= interior; ++i) x.push_back(a + (i + jitter(rng)) * h);
  x.push_back(b);
  std::vector<double> u;
  for (std::size_t i = 0; i < x.size(); ++i) u.push_back(val(rng));
  return FreeKnotSpline(x, u);
}

TEST(ReluForm, RoundTripsRandomSplines) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const FreeKnotSpline s = jittered_spline(rng, 18, -1.0, 1.0);
    const FreeKnotSpline back = from_relu_form(to_relu_form(s));
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(back.knots()[i], s.knots()[i]);
      EXPECT_NEAR(back.values()[i], s.values()[i], 1e-13);
    }
  }
}

TEST(Integrate, MatchesElementaryAreas) {
  EXPECT_DOUBLE_EQ(FreeKnotSpline::Linear(0.0, 1.0, 1.0, 1.0).integrate(), 1.0);
  FreeKnotSpline hat({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(hat.integrate(), 0.5);
  EXPECT_THROW(hat.integrate(0.8, 0.2), DomainError);
}

TEST(Integrate, AgreesWithRiemannSumAndIsAdditive) {
  std::mt19937 rng(5);
  const FreeKnotSpline s = random_spline(rng, 25, 0.0, 2.0);
  const int n = 2000000;
  const double h = 2.0 / n;
  double riemann = 0.0;
  for (int i = 0; i < n; ++i) riemann += s((i + 0.5) * h) * h;
  EXPECT_NEAR(s.integrate(), riemann, 1e-10);
  for (double m : {0.1, 0.77, 1.3, 1.999}) {
    EXPECT_NEAR(s.integrate(0.0, m) + s.integrate(m, 2.0), s.integrate(), 1e-14);
  }
}

TEST(LpError, VanishesForIdenticalFunctions) {
  std::mt19937 rng(9);
  const FreeKnotSpline s = random_spline(rng, 10, 0.0, 1.0);
  QuadratureOptions q;
  q.points = 3;
  EXPECT_LE(lp_error(s, s.as_function(), 2.0, q).absolute, 1e-14);
}

TEST(LpError, ZeroAgainstOne) {
  FreeKnotSpline zero = FreeKnotSpline::Linear(0.0, 1.0, 0.0, 0.0);
  const LpError e = lp_error(zero, [](double) { return 1.0; });
  EXPECT_NEAR(e.absolute, 1.0, 1e-14);
  EXPECT_NEAR(e.value, 1.0, 1e-14);
  EXPECT_TRUE(e.relative);
}

TEST(LpError, FlagsZeroReferenceNorm) {
  FreeKnotSpline one = FreeKnotSpline::Linear(0.0, 1.0, 1.0, 1.0);
  const LpError e = lp_error(one, [](double) { return 0.0; });
  EXPECT_FALSE(e.relative);
  EXPECT_NEAR(e.value, 1.0, 1e-14);
}

TEST(LpError, MatchesHighOrderOracleForSineInterpolant) {
  const auto f = [](double x) { return std::sin(std::numbers::pi * x); };
  const std::vector<double> knots = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  const FreeKnotSpline s = FreeKnotSpline::Interpolate(knots, f);
  const double oracle =
      std::sqrt(simpson([&](double x) { return std::pow(s(x) - f(x), 2); }, 0.0, 1.0));
  EXPECT_NEAR(lp_error(s, f).absolute, oracle, 1e-8);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 3, 5, 9}) {
    const GaussRule& r = gauss_legendre(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    EXPECT_NEAR(sum, 2.0 / (2 * n - 1), 1e-14);
  }
}

TEST(Serialization, JsonAndCsvRoundTripBitExact) {
  std::mt19937 rng(21);
  const FreeKnotSpline s = random_spline(rng, 15, -1.0, 1.0);
  double t = 0.0;
  const FreeKnotSpline j = from_json(to_json(s, 0.1 + 0.2), &t);
  EXPECT_EQ(t, 0.1 + 0.2);
  EXPECT_EQ(j.knots(), s.knots());
  EXPECT_EQ(j.values(), s.values());
  const FreeKnotSpline c = from_csv(to_csv(s));
  EXPECT_EQ(c.knots(), s.knots());
  EXPECT_EQ(c.values(), s.values());
}

TEST(FluxModel, LinearAndBurgers) {
  const FluxModel lin = FluxModel::Linear(2.0);
  EXPECT_DOUBLE_EQ(lin.flux(3.0), 6.0);
  EXPECT_DOUBLE_EQ(lin.speed(-7.0), 2.0);
  const FluxModel burgers = FluxModel::Burgers();
  EXPECT_DOUBLE_EQ(burgers.flux(3.0), 4.5);
  EXPECT_DOUBLE_EQ(burgers.speed(-7.0), -7.0);
}

}  // namespace
}  // namespace enn
