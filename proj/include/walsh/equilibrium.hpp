#pragma once

// Equilibrium measure of E and the exponents m_j = mu_E(E_j).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "walsh/error.hpp"
#include "walsh/green.hpp"
#include "walsh/quadrature.hpp"
#include "walsh/sqrt_h.hpp"

namespace walsh {

struct ExponentVector {
  std::vector<double> m;
  double defect = 0.0;  // sum of the raw masses minus 1, before renormalisation

  std::size_t size() const { return m.size(); }
  double operator[](std::size_t j) const { return m[j]; }
};

/// Equilibrium density (1/pi) |R(x)| / sqrt|H(x)| at an interior point of E.
inline double density(double x, const GreenData& g) {
  const auto loc = g.domain.locate(cdouble(x, 0.0));
  if (loc.kind != Location::Kind::InsideE)
    throw Error(ErrorCode::OutsideSupport, "density is supported on E only");
  for (double b : g.domain.endpoints())
    if (x == b) throw Error(ErrorCode::OutsideSupport, "density is infinite at an endpoint");
  double h = 1.0;
  for (double b : g.domain.endpoints()) h *= std::abs(x - b);
  return std::abs(detail::eval_R<double>(g.critical, x)) / (std::numbers::pi * std::sqrt(h));
}

/// m_j = (1/pi) int_{E_j} |R| / sqrt|H|. On component j, |R| equals
/// (-1)^(l-j) R, which keeps the integrand smooth for the Chebyshev rule.
inline ExponentVector exponents(const GreenData& g) {
  const auto& e = g.domain;
  const std::size_t ell = e.ell();
  ExponentVector out;
  double total = 0.0;
  for (std::size_t j = 1; j <= ell; ++j) {
    const double sign = gap_sign(ell, j);
    const auto r = integrate_chebyshev_weighted(
        [&](double x) {
          return sign * detail::eval_R<double>(g.critical, x) /
                 detail::sqrt_abs_H_outside(e, x, 2 * j - 1);
        },
        e.b(2 * j - 1), e.b(2 * j), g.quad);
    out.m.push_back(r.value / std::numbers::pi);
    total += out.m.back();
  }
  out.defect = total - 1.0;
  if (std::abs(out.defect) > 1e-8)
    throw Error(ErrorCode::NormalizationDefect,
                "equilibrium masses sum to 1 + " + std::to_string(out.defect));
  for (double& mj : out.m) {
    mj /= total;
    if (!(mj > 0.0)) throw Error(ErrorCode::NormalizationDefect, "non-positive mass");
  }
  return out;
}

/// (1/2 pi i) times the counter-clockwise integral of R / sqrt(H) over the
/// rectangle [b_{2j-1} - pad, b_{2j} + pad] x [-pad, pad].
inline cdouble contour_integral(const GreenData& g, std::size_t j, double pad) {
  const auto& e = g.domain;
  if (j < 1 || j > e.ell()) throw Error(ErrorCode::InvalidArgument, "component index");
  const double lo = e.b(2 * j - 1) - pad, hi = e.b(2 * j) + pad;
  if (!(pad > 0.0) || (j > 1 && lo <= e.b(2 * j - 2)) || (j < e.ell() && hi >= e.b(2 * j + 1)))
    throw Error(ErrorCode::PadTooLarge, "rectangle around component " + std::to_string(j) +
                                            " meets another component");
  const cdouble corners[] = {{lo, -pad}, {hi, -pad}, {hi, pad}, {lo, pad}};
  auto f = [&](cdouble z) { return green_derivative(z, g); };
  cdouble sum(0.0, 0.0);
  for (int s = 0; s < 4; ++s)
    sum += integrate_segment_complex(f, corners[s], corners[(s + 1) % 4], false, g.quad).value;
  return sum / cdouble(0.0, 2.0 * std::numbers::pi);
}

/// Contour-integral value of m_j, an independent check on exponents().
inline double exponents_contour_oracle(const GreenData& g, std::size_t j, double pad) {
  return contour_integral(g, j, pad).real();
}

/// Largest pad that keeps the rectangle around component j clear of its
/// neighbours, scaled by the given fraction.
inline double default_pad(const IntervalUnion& e, std::size_t j, double fraction = 0.5) {
  double room = INFINITY;
  if (j > 1) room = std::min(room, e.b(2 * j - 1) - e.b(2 * j - 2));
  if (j < e.ell()) room = std::min(room, e.b(2 * j + 1) - e.b(2 * j));
  const auto [a, b] = e.component(j);
  if (!std::isfinite(room)) room = b - a;
  return fraction * room;
}

}  // namespace walsh
