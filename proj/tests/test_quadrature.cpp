#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "walsh/quadrature.hpp"

using namespace walsh;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

// Brute-force reference for int_1^2 dx / sqrt(x^2 - 1): composite midpoint
// on a geometric mesh starting at offset eps, plus the leading-order value
// sqrt(2 eps) of the omitted piece.
double brute_force_arccosh2(double eps) {
  double sum = std::sqrt(2.0 * eps);
  double a = eps;
  while (a < 1.0) {
    const double b = std::min(1.0, a * 1.01);
    const int n = 50;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      const double t = a + (i + 0.5) * h;
      const double x = 1.0 + t;
      sum += h / std::sqrt(t * (x + 1.0));
    }
    a = b;
  }
  return sum;
}

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST(Chebyshev, WeightIntegratesToPi) {
  const auto r = integrate_chebyshev([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -1, 1);
  EXPECT_NEAR(r.value, pi, 1e-13);
}

TEST(Chebyshev, OddIntegrandVanishes) {
  const auto r = integrate_chebyshev([](double x) { return x / std::sqrt(1.0 - x * x); }, -1, 1);
  EXPECT_NEAR(r.value, 0.0, 1e-13);
}

TEST(Chebyshev, OffsetsAreExact) {
  // 1 / sqrt((x - lo)(hi - x)) on a far-shifted interval, evaluated from the
  // offsets only: the answer is pi irrespective of the shift
  const auto r = integrate_chebyshev_weighted(
      [](double, double dlo, double dhi) { return 1.0 + 0.0 * dlo * dhi; }, 1e8, 1e8 + 1e-6);
  EXPECT_NEAR(r.value, pi, 1e-13);
}

TEST(Chebyshev, ErrorEstimateBoundsMomentErrors) {
  for (int k = 0; k <= 12; ++k) {
    const auto r = integrate_chebyshev(
        [k](double x) { return std::pow(x, k) / std::sqrt(1.0 - x * x); }, -1, 1);
    const double exact = k % 2 ? 0.0 : pi * double_factorial(k - 1) / double_factorial(k);
    EXPECT_LE(std::abs(r.value - exact), std::max(r.error, 1e-14)) << "k=" << k;
  }
}

TEST(Chebyshev, Linearity) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const QuadConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const double a0 = u(rng), a1 = u(rng), a2 = u(rng), c0 = u(rng), c1 = u(rng);
    const double alpha = u(rng), beta = u(rng);
    auto f = [&](double x) { return (a0 + a1 * x + a2 * x * x) / std::sqrt(1 - x * x); };
    auto g = [&](double x) { return std::exp(c0 * x) * std::cos(c1 * x) / std::sqrt(1 - x * x); };
    const double lhs =
        integrate_chebyshev([&](double x) { return alpha * f(x) + beta * g(x); }, -1, 1).value;
    const double rhs = alpha * integrate_chebyshev(f, -1, 1).value +
                       beta * integrate_chebyshev(g, -1, 1).value;
    EXPECT_NEAR(lhs, rhs, 10 * cfg.abs_tol * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Chebyshev, RejectsBadConfig) {
  QuadConfig cfg;
  cfg.max_level = 2;
  EXPECT_THROW(integrate_chebyshev([](double) { return 1.0; }, 0, 1, cfg), Error);
  cfg = QuadConfig{};
  cfg.abs_tol = 0.0;
  EXPECT_THROW(integrate_chebyshev([](double) { return 1.0; }, 0, 1, cfg), Error);
}

TEST(Chebyshev, ReportsNoConvergence) {
  QuadConfig cfg;
  cfg.max_level = 5;
  try {
    // kink at 0.1234 stalls geometric convergence
    integrate_chebyshev_weighted([](double x) { return std::abs(x - 0.1234); }, -1, 1, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(Tail, InverseSquare) {
  EXPECT_NEAR(integrate_tail([](double x) { return 1.0 / (x * x); }, 1.0, +1).value, 1.0, 1e-13);
  EXPECT_NEAR(integrate_tail([](double x) { return 1.0 / (x * x); }, -1.0, -1).value, 1.0, 1e-13);
}

TEST(Tail, Lorentzian) {
  EXPECT_NEAR(integrate_tail([](double x) { return 1.0 / (x * x + 1.0); }, 0.0, +1).value,
              pi / 2, 1e-13);
}

TEST(Tail, SingularEndpointWithOffsets) {
  // int_1^inf (1/sqrt(x^2-1) - 1/x) dx = log 2
  const auto r = integrate_tail(
      [](double x, double d) { return 1.0 / std::sqrt(d * (x + 1.0)) - 1.0 / x; }, 1.0, +1);
  EXPECT_NEAR(r.value, std::log(2.0), 1e-13);
  const auto s = integrate_tail(
      [](double x, double d) { return 1.0 / std::sqrt(d * (x + 1.0)) - 1.0 / x; }, 1.0, +1,
      QuadConfig{}, 0.05);
  EXPECT_NEAR(s.value, std::log(2.0), 1e-13);
}

TEST(Segment, Constant) {
  const auto r = integrate_segment_complex([](cd) { return cd(1.0); }, 0.0, cd(1, 1), false);
  EXPECT_NEAR(std::abs(r.value - cd(1, 1)), 0.0, 1e-14);
}

TEST(Segment, ExactAntiderivative) {
  const auto r = integrate_segment_complex([](cd z) { return 2.0 * z; }, 1.0, cd(0, 1), false);
  EXPECT_NEAR(std::abs(r.value - cd(-2.0, 0.0)), 0.0, 1e-14);
}

TEST(Segment, InverseSqrtAtStart) {
  const double closed_form = std::log(2.0 + std::sqrt(3.0));
  // the closed form itself is confirmed by brute force
  EXPECT_NEAR(brute_force_arccosh2(1e-12), closed_form, 1e-5);
  const auto r = integrate_segment_complex(
      [](cd z, cd off) { return 1.0 / (std::sqrt(off) * std::sqrt(z + 1.0)); }, 1.0, 2.0, true);
  EXPECT_NEAR(r.value.real(), closed_form, 1e-13);
  EXPECT_NEAR(r.value.imag(), 0.0, 1e-15);
  // principal-product branch evaluated without offsets
  const auto s = integrate_segment_complex(
      [](cd z) { return 1.0 / (std::sqrt(z - 1.0) * std::sqrt(z + 1.0)); }, 1.0, 2.0, true);
  EXPECT_NEAR(s.value.real(), closed_form, 1e-12);
}

TEST(Segment, Orientation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const cd z0(u(rng), u(rng)), z1(u(rng), u(rng));
    auto f = [](cd z) { return std::exp(z) / (z * z + 9.0); };
    const auto fwd = integrate_segment_complex(f, z0, z1, false).value;
    const auto bwd = integrate_segment_complex(f, z1, z0, false).value;
    EXPECT_NEAR(std::abs(fwd + bwd), 0.0, 1e-12);
  }
}

TEST(Segment, RealAbscissae) {
  const auto r = integrate_segment([](double x) { return std::cos(x); }, 0.0, pi / 2, false);
  EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(Segment, GrazingPathRefinesLocally) {
  // passes within 1e-7 of a pole at 0.5
  const cd z0(0, 1e-7), z1(1, 1e-7);
  const auto r = integrate_segment_complex([](cd z) { return 1.0 / std::sqrt(z - 0.5); }, z0, z1,
                                           false);
  const cd exact = 2.0 * (std::sqrt(z1 - 0.5) - std::sqrt(z0 - 0.5));
  EXPECT_NEAR(std::abs(r.value - exact), 0.0, 1e-11);
}
