#pragma once

// Green's function of the complement of E with pole at infinity:
//
//   g_E(z) = Re int_b^z R(t) / sqrt(H(t)) dt,
//
// where R is the monic polynomial of degree l-1 whose integrals against
// 1/sqrt(H) vanish over every bounded gap. Its zeros are the critical points
// of g_E, one per bounded gap.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walsh/error.hpp"
#include "walsh/interval_domain.hpp"
#include "walsh/quadrature.hpp"
#include "walsh/sqrt_h.hpp"

namespace walsh {

/// A polynomial in the Chebyshev basis of t = (x - center) / halfwidth, scaled
/// so that p(x) = halfwidth^degree * sum_k c_k T_k(t). With the leading
/// coefficient 2^(1-degree) it is monic in x.
class ChebyshevPoly {
 public:
  ChebyshevPoly() = default;
  ChebyshevPoly(double center, double halfwidth, std::vector<double> coeffs)
      : center_(center), halfwidth_(halfwidth), c_(std::move(coeffs)) {}

  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  std::span<const double> coefficients() const { return c_; }
  double center() const { return center_; }
  double halfwidth() const { return halfwidth_; }

  double operator()(double x) const { return eval(x).first; }
  double derivative(double x) const { return eval(x).second; }

  /// Value and derivative with respect to x.
  std::pair<double, double> eval(double x) const {
    const double t = (x - center_) / halfwidth_;
    double tm1 = 1.0, t0 = t;      // T_{k-1}, T_k
    double dm1 = 0.0, d0 = 1.0;    // their t-derivatives
    double value = c_.empty() ? 0.0 : c_[0];
    double slope = 0.0;
    if (c_.size() > 1) {
      value += c_[1] * t;
      slope += c_[1];
    }
    for (std::size_t k = 2; k < c_.size(); ++k) {
      const double tn = 2.0 * t * t0 - tm1;
      const double dn = 2.0 * t0 + 2.0 * t * d0 - dm1;
      value += c_[k] * tn;
      slope += c_[k] * dn;
      tm1 = t0;
      t0 = tn;
      dm1 = d0;
      d0 = dn;
    }
    const double s = std::pow(halfwidth_, static_cast<double>(degree()));
    return {s * value, s * slope / halfwidth_};
  }

  /// T_k(t(x)) for k = 0..n.
  static void basis(double t, std::span<double> out) {
    if (out.empty()) return;
    out[0] = 1.0;
    if (out.size() > 1) out[1] = t;
    for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
  }

 private:
  double center_ = 0.0;
  double halfwidth_ = 1.0;
  std::vector<double> c_{1.0};
};

struct CapacityEstimate {
  double value = 0.0;  // mean of the two tail formulas
  double right = 0.0;  // from the ray (b_2l, +inf)
  double left = 0.0;   // from the ray (-inf, b_1)
  double discrepancy = 0.0;
  double beta_right = 0.0;
  double beta_left = 0.0;
};

/// Everything computed on the E side. Immutable once built by compute_green.
struct GreenData {
  IntervalUnion domain{std::vector<double>{-1.0, 1.0}};
  QuadConfig quad;
  ChebyshevPoly r_basis;
  std::vector<double> critical;       // z_1 < ... < z_{l-1}
  std::vector<double> r_coeffs;       // r_0 .. r_{l-2}; R is monic
  std::vector<double> gap_residuals;  // int_{I_j} R / sqrt(H)
  double pivot_ratio = 1.0;
  double alpha = 0.0;
  std::vector<double> green_at_critical;
  CapacityEstimate cap;

  std::size_t ell() const { return domain.ell(); }
  double capacity() const { return cap.value; }
};

namespace detail {

/// R(x) from its zeros.
template <class T>
T eval_R(std::span<const double> roots, T x) {
  T out(1.0);
  for (double z : roots) out *= (x - z);
  return out;
}

/// R(x) / sqrt|H(x)| for real x with the factor |x - b_base| replaced by the
/// exact offset d. Factors are grouped so that every partial product stays
/// O(1) for large |x|.
inline double ratio_abs(const GreenData& g, double x, std::size_t base, double d) {
  const auto& e = g.domain;
  auto dist = [&](std::size_t m) { return m == base ? d : std::abs(x - e.b(m)); };
  const std::size_t ell = e.ell();
  double p = 1.0;
  for (std::size_t k = 1; k < ell; ++k)
    p *= (x - g.critical[k - 1]) / std::sqrt(dist(2 * k - 1) * dist(2 * k));
  return p / std::sqrt(dist(2 * ell - 1) * dist(2 * ell));
}

/// R(z) / sqrt(H(z)) off E, with the factor z - b_base supplied as offset.
inline cdouble ratio_complex(const GreenData& g, cdouble z, std::size_t base, cdouble offset) {
  const auto& e = g.domain;
  const std::size_t ell = e.ell();
  auto root = [&](std::size_t m) { return std::sqrt(m == base ? offset : z - e.b(m)); };
  cdouble p(1.0, 0.0);
  for (std::size_t k = 1; k < ell; ++k)
    p *= (z - g.critical[k - 1]) / (root(2 * k - 1) * root(2 * k));
  return p / (root(2 * ell - 1) * root(2 * ell));
}

/// Dense solve with partial pivoting; returns min/max pivot magnitude ratio.
inline double solve_dense(std::vector<double> a, std::vector<double>& rhs, std::size_t n) {
  double pmin = INFINITY, pmax = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(rhs[c], rhs[piv]);
    }
    const double p = a[c * n + c];
    pmin = std::min(pmin, std::abs(p));
    pmax = std::max(pmax, std::abs(p));
    if (p == 0.0) return 0.0;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / p;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = rhs[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * rhs[k];
    rhs[c] = s / a[c * n + c];
  }
  return pmax > 0.0 ? pmin / pmax : 0.0;
}

/// sqrt of prod |x - b_m| over all endpoints except the two bounding (lo, hi).
inline double sqrt_abs_H_outside(const IntervalUnion& e, double x, std::size_t lo_index) {
  double p = 1.0;
  for (std::size_t m = 1; m <= 2 * e.ell(); ++m)
    if (m != lo_index && m != lo_index + 1) p *= std::abs(x - e.b(m));
  return std::sqrt(p);
}

}  // namespace detail

struct RSolution {
  ChebyshevPoly poly;
  std::vector<double> gap_residuals;
  double pivot_ratio = 1.0;
};

/// Solves the gap conditions int_{I_j} R / sqrt(H) = 0, j = 1..l-1, for the
/// monic R of degree l-1. The unknowns are Chebyshev coefficients in the
/// variable scaled to the hull of E, which keeps the moment matrix well
/// conditioned for many intervals.
inline RSolution compute_R(const IntervalUnion& e, const QuadConfig& cfg = {}) {
  const std::size_t ell = e.ell();
  const double center = 0.5 * (e.b(1) + e.b(2 * ell));
  const double halfwidth = 0.5 * e.diameter();
  if (ell == 1) return {ChebyshevPoly(center, halfwidth, {1.0}), {}, 1.0};

  const std::size_t n = ell - 1;  // unknowns c_0..c_{l-2}
  const double lead = std::ldexp(1.0, 1 - static_cast<int>(n));
  std::vector<double> a(n * n), rhs(n);
  std::vector<double> tk(ell);
  for (std::size_t j = 1; j <= n; ++j) {
    const double lo = e.b(2 * j), hi = e.b(2 * j + 1);
    const double sign = gap_sign(ell, j);
    for (std::size_t k = 0; k <= n; ++k) {
      const auto r = integrate_chebyshev_weighted(
          [&](double x) {
            ChebyshevPoly::basis((x - center) / halfwidth, tk);
            return tk[k] / (sign * detail::sqrt_abs_H_outside(e, x, 2 * j));
          },
          lo, hi, cfg);
      if (k < n)
        a[(j - 1) * n + k] = r.value;
      else
        rhs[j - 1] = -lead * r.value;
    }
  }
  const std::vector<double> a_copy = a, rhs_copy = rhs;
  const double ratio = detail::solve_dense(a, rhs, n);
  if (!(ratio >= 1e-13))
    throw Error(ErrorCode::SingularSystem,
                "moment matrix pivot ratio " + std::to_string(ratio) + " below 1e-13");

  std::vector<double> coeffs(rhs.begin(), rhs.end());
  coeffs.push_back(lead);
  RSolution out{ChebyshevPoly(center, halfwidth, coeffs), {}, ratio};
  for (std::size_t j = 1; j <= n; ++j) {
    double res = -rhs_copy[j - 1];
    double mag = std::abs(rhs_copy[j - 1]);
    for (std::size_t k = 0; k < n; ++k) {
      res += a_copy[(j - 1) * n + k] * coeffs[k];
      mag = std::max(mag, std::abs(a_copy[(j - 1) * n + k] * coeffs[k]));
    }
    // residual of the scaled problem expressed for the monic R in x
    res *= std::pow(halfwidth, static_cast<double>(n));
    out.gap_residuals.push_back(res);
    const double allowed =
        10.0 * cfg.threshold(mag * std::pow(halfwidth, static_cast<double>(n)));
    if (!(std::abs(res) <= allowed))
      throw Error(ErrorCode::SingularSystem,
                  "gap condition " + std::to_string(j) + " residual " + std::to_string(res));
  }
  return out;
}

/// Zeros of R, one per bounded gap: bisection to a 1e-10 bracket followed by
/// three Newton steps with the analytic derivative.
inline std::vector<double> critical_points(const ChebyshevPoly& r, const IntervalUnion& e) {
  std::vector<double> roots;
  for (std::size_t j = 1; j < e.ell(); ++j) {
    double lo = e.b(2 * j), hi = e.b(2 * j + 1);
    double flo = r(lo);
    const double fhi = r(hi);
    if (!(flo * fhi < 0.0))
      throw Error(ErrorCode::RootNotBracketed, "R has no sign change in gap " + std::to_string(j));
    while (hi - lo > 1e-10 * std::max(1.0, std::abs(lo))) {
      const double mid = 0.5 * (lo + hi);
      const double fm = r(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      const auto [v, d] = r.eval(x);
      if (d == 0.0) break;
      const double next = x - v / d;
      if (!(next > e.b(2 * j) && next < e.b(2 * j + 1))) break;
      x = next;
    }
    roots.push_back(x);
  }
  return roots;
}

/// Newton on the gap conditions with the critical points as unknowns. The
/// integrands are evaluated in product form, which stays accurate when the
/// moment system for the coefficients is poorly conditioned. Returns the
/// final gap residuals.
inline std::vector<double> refine_critical(const IntervalUnion& e, std::vector<double>& z,
                                           const QuadConfig& cfg = {}) {
  const std::size_t n = z.size();
  std::vector<double> f(n), jac(n * n);
  auto evaluate = [&](const std::vector<double>& pts) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double sign = gap_sign(e.ell(), j);
      for (std::size_t i = 0; i <= n; ++i) {
        // i < n: derivative with respect to z_i, i == n: the condition itself
        const auto r = integrate_chebyshev_weighted(
            [&](double x) {
              double p = 1.0;
              for (std::size_t k = 0; k < n; ++k)
                if (k != i) p *= x - pts[k];
              return p / (sign * detail::sqrt_abs_H_outside(e, x, 2 * j));
            },
            e.b(2 * j), e.b(2 * j + 1), cfg);
        if (i < n)
          jac[(j - 1) * n + i] = -r.value;
        else
          f[j - 1] = r.value;
      }
    }
  };
  evaluate(z);
  for (int it = 0; it < 4; ++it) {
    std::vector<double> step = f, a = jac;
    if (!(detail::solve_dense(a, step, n) > 0.0)) break;
    std::vector<double> next(n);
    double biggest = 0.0;
    bool inside = true;
    for (std::size_t k = 0; k < n; ++k) {
      next[k] = z[k] - step[k];
      biggest = std::max(biggest, std::abs(step[k]) / (e.b(2 * k + 3) - e.b(2 * k + 2)));
      inside = inside && next[k] > e.b(2 * k + 2) && next[k] < e.b(2 * k + 3);
    }
    if (!inside) break;
    const std::vector<double> f_old = f;
    evaluate(next);
    double old_norm = 0.0, new_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      old_norm = std::max(old_norm, std::abs(f_old[k]));
      new_norm = std::max(new_norm, std::abs(f[k]));
    }
    if (!(new_norm <= old_norm)) {
      f = f_old;
      break;
    }
    z = next;
    if (biggest < 1e-15) break;
  }
  return f;
}

/// Power-basis coefficients r_0..r_{n-1} of the monic polynomial with the
/// given zeros (the leading 1 is omitted).
inline std::vector<double> monic_coefficients(std::span<const double> roots) {
  std::vector<double> c{1.0};  // highest degree last
  for (double z : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= z * c[k];
    }
    c = std::move(next);
  }
  c.pop_back();
  return c;
}

/// alpha = (1/2) sum b_j - sum z_j, the 1/z^2 coefficient of 2 d/dz g_E.
inline double alpha(const IntervalUnion& e, std::span<const double> critical) {
  double s = 0.5 * e.sum_endpoints();
  for (double z : critical) s -= z;
  return s;
}

/// 2 d/dz g_E(z) = R(z) / sqrt(H(z)) off E.
inline cdouble green_derivative(cdouble z, const GreenData& g) {
  return detail::eval_R<cdouble>(g.critical, z) / sqrtH(g.domain, z);
}

/// g_E(x) for real x, integrating R / sqrt(H) along the axis from the nearest
/// endpoint of the gap containing x. Zero on E.
inline double green_real(double x, const GreenData& g) {
  const auto& e = g.domain;
  const auto loc = e.locate(cdouble(x, 0.0));
  if (loc.kind == Location::Kind::InsideE) return 0.0;
  const std::size_t ell = e.ell();
  const std::size_t k = loc.index;
  std::size_t base;
  if (k == 0)
    base = 1;
  else if (k == ell)
    base = 2 * ell;
  else
    base = (x - e.b(2 * k) <= e.b(2 * k + 1) - x) ? 2 * k : 2 * k + 1;
  const double sign = gap_sign(ell, k);
  const auto r = integrate_segment(
      [&](double xi, double off) { return detail::ratio_abs(g, xi, base, std::abs(off)) / sign; },
      e.b(base), x, true, g.quad);
  return r.value;
}

/// Complex Green's function u(z) = int_{b_2l}^z R / sqrt(H) along the straight
/// segment from b_2l; Re u = g_E.
inline cdouble green_complex(cdouble z, const GreenData& g) {
  const double start = g.domain.b(2 * g.ell());
  if (z.imag() == 0.0 && z.real() <= start)
    throw Error(ErrorCode::PathOnCut, "the path from b_2l must avoid (-inf, b_2l]");
  const auto r = integrate_segment(
      [&](cdouble zeta, cdouble off) { return detail::ratio_complex(g, zeta, 2 * g.ell(), off); },
      cdouble(start, 0.0), z, true, g.quad);
  return r.value;
}

/// g_E anywhere in the plane.
inline double green_value(cdouble z, const GreenData& g) {
  const auto loc = g.domain.locate(z);
  switch (loc.kind) {
    case Location::Kind::InsideE: return 0.0;
    case Location::Kind::InGap: return green_real(z.real(), g);
    case Location::Kind::OffAxis: return green_complex(z, g).real();
  }
  return 0.0;
}

/// Capacity from the two tail formulas
///   cap = (b_2l - beta_r) exp(int_{b_2l}^inf (1/(x - beta_r) - R/sqrt(H)) dx)
///       = (beta_l - b_1) exp(int_{-inf}^{b_1} (R/sqrt(H) - 1/(x - beta_l)) dx)
/// with beta_r < b_2l and beta_l > b_1.
inline CapacityEstimate capacity(const GreenData& g, std::optional<double> beta_right = {},
                                 std::optional<double> beta_left = {}) {
  const auto& e = g.domain;
  const std::size_t ell = e.ell();
  const double b1 = e.b(1), b2l = e.b(2 * ell);
  CapacityEstimate out;
  out.beta_right = beta_right.value_or(b2l - 1.0);
  out.beta_left = beta_left.value_or(b1 + 1.0);
  if (!(out.beta_right < b2l) || !(out.beta_left > b1))
    throw Error(ErrorCode::InvalidArgument, "shift parameters outside their legal ranges");

  const double shift_r = b2l - out.beta_right;
  const auto right = integrate_tail(
      [&](double x, double d) {
        return 1.0 / (shift_r + d) - detail::ratio_abs(g, x, 2 * ell, d);
      },
      b2l, +1, g.quad);
  out.right = shift_r * std::exp(right.value);

  const double shift_l = out.beta_left - b1;
  const double sign0 = gap_sign(ell, 0);
  const auto left = integrate_tail(
      [&](double x, double d) {
        return detail::ratio_abs(g, x, 1, d) / sign0 + 1.0 / (shift_l + d);
      },
      b1, -1, g.quad);
  out.left = shift_l * std::exp(left.value);

  out.value = 0.5 * (out.right + out.left);
  out.discrepancy = std::abs(out.right - out.left);
  return out;
}

/// Builds the complete E-side data: R, critical points, alpha, capacity and
/// the Green's function at the critical points.
inline GreenData compute_green(const IntervalUnion& e, const QuadConfig& cfg = {}) {
  cfg.validate();
  GreenData g;
  g.domain = e;
  g.quad = cfg;
  auto sol = compute_R(e, cfg);
  g.r_basis = std::move(sol.poly);
  g.gap_residuals = std::move(sol.gap_residuals);
  g.pivot_ratio = sol.pivot_ratio;
  g.critical = critical_points(g.r_basis, e);
  g.gap_residuals = refine_critical(e, g.critical, cfg);
  g.r_coeffs = monic_coefficients(g.critical);
  g.alpha = alpha(e, g.critical);
  for (double z : g.critical) g.green_at_critical.push_back(green_real(z, g));
  g.cap = capacity(g);
  if (g.cap.discrepancy > 100.0 * cfg.threshold(g.cap.value))
    throw Error(ErrorCode::CapacityMismatch,
                "tail formulas disagree by " + std::to_string(g.cap.discrepancy));
  return g;
}

struct PreimageFit {
  int n = 0;
  std::vector<int> counts;
};

/// Looks for a common denominator n <= max_denominator with |m_j - n_j/n| <=
/// tol for every j. A numerical hint only: rational masses characterise
/// polynomial pre-images exactly, which no finite tolerance can certify.
inline std::optional<PreimageFit> check_preimage_diag(std::span<const double> m, double tol,
                                                      int max_denominator = 64) {
  for (int n = 1; n <= max_denominator; ++n) {
    PreimageFit fit{n, {}};
    int total = 0;
    bool ok = true;
    for (double mj : m) {
      const int nj = static_cast<int>(std::lround(mj * n));
      if (nj < 1 || std::abs(mj - static_cast<double>(nj) / n) > tol) {
        ok = false;
        break;
      }
      fit.counts.push_back(nj);
      total += nj;
    }
    if (ok && total == n) return fit;
  }
  return std::nullopt;
}

}  // namespace walsh
