#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "walsh/green.hpp"

using namespace walsh;

namespace {

// Midpoint rule after the substitution x = lo + (hi - lo) * s^2 (3 - 2 s),
// which flattens inverse square root endpoint singularities. Slow and
// independent of the library quadrature.
template <class F>
double smoothstep_midpoint(F f, double lo, double hi, int n = 400000) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    const double x = lo + (hi - lo) * u * u * (3.0 - 2.0 * u);
    const double dx = (hi - lo) * 6.0 * u * (1.0 - u);
    s += f(x) * dx;
  }
  return s / n;
}

double abs_sqrtH(const IntervalUnion& e, double x) {
  double p = 1.0;
  for (double b : e.endpoints()) p *= std::abs(x - b);
  return std::sqrt(p);
}

IntervalUnion cantor(int level) {
  std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
  for (int k = 0; k < level; ++k) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : iv) next.push_back({a / 3.0, b / 3.0});
    for (auto [a, b] : iv) next.push_back({2.0 / 3.0 + a / 3.0, 2.0 / 3.0 + b / 3.0});
    iv = next;
  }
  return parse_domain(iv);
}

}  // namespace

TEST(SqrtH, PrincipalBranchValues) {
  const auto e = parse_domain({{-1.0, 1.0}});
  EXPECT_NEAR(sqrtH(e, 2.0).real(), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(sqrtH(e, -2.0).real(), -std::sqrt(3.0), 1e-15);
  const auto two = parse_domain({{-2.0, -1.0}, {1.0, 2.0}});
  EXPECT_NEAR(sqrtH(two, 0.0).real(), -2.0, 1e-15);
  EXPECT_THROW(sqrtH(e, 0.5), Error);
}

TEST(SqrtH, RimValuesAreLimits) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 0.5}, {0.8, 1.0}});
  for (double x : {-0.7, 0.2, 0.9}) {
    for (int side : {1, -1}) {
      const cdouble rim = sqrtH_rim(e, x, side);
      const cdouble near = sqrtH(e, cdouble(x, side * 1e-9));
      EXPECT_NEAR(std::abs(rim - near), 0.0, 1e-6) << x << " " << side;
    }
    EXPECT_NEAR(std::abs(sqrtH_rim(e, x, 1) - std::conj(sqrtH_rim(e, x, -1))), 0.0, 1e-15);
  }
  EXPECT_THROW(sqrtH_rim(e, 0.0, 1), Error);
}

TEST(SqrtH, SignOnGaps) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 0.5}, {0.8, 1.0}});
  const double xs[] = {-3.0, -0.1, 0.6, 4.0};
  for (std::size_t k = 0; k < 4; ++k) {
    const double v = sqrtH(e, xs[k]).real();
    EXPECT_EQ(v > 0 ? 1.0 : -1.0, gap_sign(3, k));
    EXPECT_NEAR(std::abs(v) / abs_sqrtH(e, xs[k]), 1.0, 1e-14);
  }
}

TEST(Green, SingleIntervalClosedForm) {
  const auto e = parse_domain({{-1.0, 1.0}});
  const auto g = compute_green(e);
  EXPECT_NEAR(g.capacity(), 0.5, 1e-13);
  EXPECT_NEAR(g.alpha, 0.0, 1e-15);
  for (double x : {1.5, -3.0, 10.0})
    EXPECT_NEAR(green_real(x, g), std::acosh(std::abs(x)), 1e-12);
  const cdouble z(0.3, 0.8);
  EXPECT_NEAR(green_value(z, g), std::log(std::abs(z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0))),
              1e-12);
}

TEST(Green, TwoIntervalExample) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 1.0}});
  const auto g = compute_green(e);
  ASSERT_EQ(g.critical.size(), 1u);
  EXPECT_NEAR(g.critical[0], -0.10209, 5e-5);
  EXPECT_NEAR(g.green_at_critical[0], 0.20383, 5e-5);
  EXPECT_NEAR(g.capacity(), 0.48978, 5e-5);
  EXPECT_NEAR(g.alpha, 0.00209, 5e-5);
  EXPECT_LT(g.cap.discrepancy, 1e-11);
}

TEST(Green, GapConditionsAgainstBruteForce) {
  const auto e = parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}, {2.6, 3.0}});
  const auto g = compute_green(e);
  for (std::size_t j = 1; j < e.ell(); ++j) {
    const double v = smoothstep_midpoint(
        [&](double x) { return detail::eval_R<double>(g.critical, x) / abs_sqrtH(e, x); },
        e.b(2 * j), e.b(2 * j + 1));
    const double scale = smoothstep_midpoint(
        [&](double x) { return std::abs(detail::eval_R<double>(g.critical, x)) / abs_sqrtH(e, x); },
        e.b(2 * j), e.b(2 * j + 1));
    EXPECT_LT(std::abs(v), 1e-7 * scale) << "gap " << j;
    // g_E at the critical point is half the gap integral of |R|/sqrt|H|
    EXPECT_NEAR(g.green_at_critical[j - 1], 0.5 * scale, 1e-7);
  }
}

TEST(Green, CoefficientsMatchCompanionEigenvalues) {
  const auto e = parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}, {2.6, 3.0}, {3.5, 4.0}});
  const auto g = compute_green(e);
  const std::size_t n = g.r_coeffs.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = -g.r_coeffs[i];
  Eigen::VectorXcd ev = c.eigenvalues();
  std::vector<double> roots;
  for (auto v : ev) {
    EXPECT_LT(std::abs(v.imag()), 1e-9);
    roots.push_back(v.real());
  }
  std::sort(roots.begin(), roots.end());
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(roots[k], g.critical[k], 1e-9);
  // the basis representation vanishes at the same points
  for (double z : g.critical) EXPECT_LT(std::abs(g.r_basis(z)), 1e-10);
}

TEST(Green, CantorCapacities) {
  const auto g2 = compute_green(cantor(2));
  EXPECT_NEAR(g2.capacity(), 0.228430704425168, 5e-12);
  const auto g3 = compute_green(cantor(3));
  EXPECT_NEAR(g3.capacity(), 0.224752818755217, 5e-12);
}

TEST(Green, ComplexAndRealBranchesAgree) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 0.5}, {0.8, 1.0}});
  const auto g = compute_green(e);
  for (double x : {-0.1, 0.65, 1.7, -2.5}) {
    const double real_path = green_real(x, g);
    EXPECT_NEAR(green_complex(cdouble(x, 1e-7), g).real(), real_path, 1e-8) << x;
  }
  EXPECT_THROW(green_complex(cdouble(0.0, 0.0), g), Error);
}

TEST(Green, EquivarianceAndSymmetry) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 0.5}, {0.8, 1.0}});
  const auto g = compute_green(e);
  const double s = 2.5, t = -0.7;
  const auto h = compute_green(e.affine(s, t));
  EXPECT_NEAR(h.capacity(), s * g.capacity(), 1e-12);
  EXPECT_NEAR(h.alpha, s * g.alpha + t, 1e-12);
  const cdouble z(0.2, 0.4);
  EXPECT_NEAR(green_value(s * z + t, h), green_value(z, g), 1e-11);
  EXPECT_NEAR(green_value(std::conj(z), g), green_value(z, g), 1e-12);
  // g_E(z) = log|z| - log cap - Re(alpha / z) + O(1/z^2)
  const cdouble far(3e4, 2e4);
  const double expansion = std::log(std::abs(far)) - std::log(g.capacity()) - (g.alpha / far).real();
  EXPECT_NEAR(green_value(far, g), expansion, 1e-8);
}

TEST(Green, PreimageHint) {
  const double m[] = {2.0 / 3.0, 1.0 / 3.0};
  const auto fit = check_preimage_diag(m, 1e-10);
  ASSERT_TRUE(fit);
  EXPECT_EQ(fit->n, 3);
  const double irr[] = {1.0 / std::numbers::sqrt2, 1.0 - 1.0 / std::numbers::sqrt2};
  EXPECT_FALSE(check_preimage_diag(irr, 1e-10));
}

TEST(Green, ClusteredTenIntervals) {
  // reference capacity from a 30-digit evaluation of both tail formulas
  const IntervalUnion e(std::vector<double>{
      -0.98374698974845964, -0.95562505394886754, -0.87691767992129033, -0.81699004966021016,
      -0.76659182504150736, -0.75720060403735856, -0.68821816380669887, -0.66608090792031871,
      -0.60680764653043329, -0.5983394398870765, -0.57256122568955403, -0.55301176190895607,
      -0.49199524677077422, -0.48056103507466241, -0.44829723808283339, -0.14530396471611384,
      -0.031078081310065175, 0.46258217068938778, 0.84044028638392931, 0.95017039638213663});
  const auto g = compute_green(e);
  EXPECT_NEAR(g.cap.right, 0.45650333761131168, 1e-13);
  EXPECT_NEAR(g.cap.left, 0.45650333761131168, 1e-13);
  for (double r : g.gap_residuals) EXPECT_LT(std::abs(r), 1e-13);
}
