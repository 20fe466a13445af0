#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "walsh/equilibrium.hpp"

using namespace walsh;

namespace {

// Trapezoid rule on [lo + eps, hi - eps] after x = lo + (hi - lo)(1 - cos t)/2,
// independent of the library rules.
template <class F>
double cosine_trapezoid(F f, double lo, double hi, int n = 200000) {
  const double eps = 1e-8;
  const double t0 = std::acos(1.0 - 2.0 * eps / (hi - lo));
  const double t1 = std::numbers::pi - t0;
  const double h = (t1 - t0) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i * h;
    const double x = lo + 0.5 * (hi - lo) * (1.0 - std::cos(t));
    const double dx = 0.5 * (hi - lo) * std::sin(t);
    s += (i == 0 || i == n ? 0.5 : 1.0) * f(x) * dx;
  }
  return s * h;
}

}  // namespace

TEST(Density, ArcsineLaw) {
  const auto g = compute_green(parse_domain({{-1.0, 1.0}}));
  EXPECT_NEAR(density(0.0, g), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(density(0.6, g), 1.0 / (std::numbers::pi * 0.8), 1e-14);
  EXPECT_THROW(density(1.0, g), Error);
  EXPECT_THROW(density(1.5, g), Error);
}

TEST(Density, IntegratesToComponentMasses) {
  const auto e = parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}});
  const auto g = compute_green(e);
  const auto m = exponents(g);
  double total = 0.0;
  for (std::size_t j = 1; j <= 3; ++j) {
    const auto [lo, hi] = e.component(j);
    const double v = cosine_trapezoid([&](double x) { return density(x, g); }, lo, hi);
    // the cut-off near each endpoint omits O(sqrt(eps)) mass
    EXPECT_NEAR(v, m[j - 1], 1e-3);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 2e-3);
}

TEST(Exponents, KnownValues) {
  const auto sym = exponents(compute_green(parse_domain({{-2.0, -1.0}, {1.0, 2.0}})));
  EXPECT_NEAR(sym[0], 0.5, 1e-13);
  EXPECT_NEAR(sym[1], 0.5, 1e-13);

  const auto ex44 = exponents(compute_green(parse_domain({{-1.0, -0.3}, {0.1, 1.0}})));
  EXPECT_NEAR(ex44[0], 0.46710, 5e-5);
  EXPECT_NEAR(ex44[1], 0.53289, 5e-5);
  EXPECT_LT(std::abs(ex44.defect), 1e-11);

  const auto ex55 = exponents(compute_green(parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}})));
  EXPECT_NEAR(ex55[0], 0.3601, 5e-5);
  EXPECT_NEAR(ex55[1], 0.1772, 5e-5);
  EXPECT_NEAR(ex55[2], 0.4627, 5e-5);
}

TEST(Exponents, SymmetricSetsArePalindromic) {
  const auto m = exponents(
      compute_green(parse_domain({{-1.0, -0.7}, {-0.4, -0.1}, {0.1, 0.4}, {0.7, 1.0}})));
  EXPECT_NEAR(m[0], m[3], 1e-13);
  EXPECT_NEAR(m[1], m[2], 1e-13);
}

TEST(ContourOracle, AgreesWithEquilibriumIntegral) {
  for (const auto& e : {parse_domain({{-1.0, -0.3}, {0.1, 1.0}}),
                        parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}}),
                        parse_domain({{-1.0, -0.6}, {-0.5, 0.0}, {0.3, 0.35}, {0.6, 1.0}})}) {
    const auto g = compute_green(e);
    const auto m = exponents(g);
    double sum = 0.0;
    for (std::size_t j = 1; j <= e.ell(); ++j) {
      const cdouble v = contour_integral(g, j, default_pad(e, j));
      EXPECT_NEAR(v.real(), m[j - 1], 1e-8) << j;
      EXPECT_NEAR(v.imag(), 0.0, 1e-10);
      sum += v.real();
    }
    EXPECT_NEAR(sum, 1.0, 1e-8);
  }
}

TEST(ContourOracle, RejectsOversizedRectangle) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 1.0}});
  const auto g = compute_green(e);
  EXPECT_THROW(exponents_contour_oracle(g, 1, 0.5), Error);
  try {
    exponents_contour_oracle(g, 2, 0.4);
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::PadTooLarge);
  }
}
