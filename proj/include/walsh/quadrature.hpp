#pragma once

// Integration rules for the three integral shapes that occur on interval
// unions:
//   * finite intervals with inverse square root singularities at both ends
//     (cosine substitution, Gauss-Chebyshev nodes, node doubling);
//   * half lines with O(1/x^2) decay and a 1/sqrt singularity at the finite
//     end (double exponential rule);
//   * straight segments in the complex plane with an optional 1/sqrt
//     singularity at the start (quadratic substitution, composite Gauss).
//
// Integrands may take extra arguments carrying the exact offsets from the
// singular endpoints; near an endpoint x - lo cannot be recovered from x
// without cancellation, and every integrand in this library needs it.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "walsh/error.hpp"

namespace walsh {

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_level = 12;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be positive");
    if (max_level < 3) throw Error(ErrorCode::InvalidArgument, "max_level must be at least 3");
  }

  double threshold(double magnitude) const { return std::max(abs_tol, rel_tol * magnitude); }
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;  // |last - previous| of the refinement sequence
  int level = 0;
  std::size_t evaluations = 0;
};

namespace detail {

/// Result of calling F with the offset-carrying signature when it is
/// supported, else with the leading argument only.
template <class F, class A, class... Offsets>
using result_t = std::decay_t<typename std::conditional_t<std::is_invocable_v<F, A, Offsets...>,
                                                          std::invoke_result<F, A, Offsets...>,
                                                          std::invoke_result<F, A>>::type>;

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [0, 1].
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> x{};
  std::array<double, N> w{};

  GaussLegendre() {
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      double t = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (std::size_t k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / static_cast<double>(k);
          p0 = p1;
          p1 = p2;
        }
        dp = static_cast<double>(N) * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      const double weight = 1.0 / ((1.0 - t * t) * dp * dp);  // half of the [-1,1] weight
      x[i] = 0.5 * (1.0 - t);
      x[N - 1 - i] = 0.5 * (1.0 + t);
      w[i] = weight;
      w[N - 1 - i] = weight;
    }
  }
};

inline const GaussLegendre<16>& gauss16() {
  static const GaussLegendre<16> rule;
  return rule;
}

}  // namespace detail

/// Integral of g(x) / sqrt((x - lo)(hi - x)) over (lo, hi) for smooth g.
///
/// With x = (lo+hi)/2 + (hi-lo)/2 cos t the weight disappears and the
/// integrand in t is smooth and even-periodic, so the midpoint rule in t
/// (the Gauss-Chebyshev rule) converges geometrically. g is called as
/// g(x, x - lo, hi - x) when it accepts three arguments, else g(x).
template <class G>
auto integrate_chebyshev_weighted(G&& g, double lo, double hi, const QuadConfig& cfg = {}) {
  using T = detail::result_t<G, double, double, double>;
  cfg.validate();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  auto rule = [&](std::size_t n) {
    T sum{};
    for (std::size_t k = 0; k < n; ++k) {
      const double t = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      const double c = std::cos(t);
      const double x = mid + half * c;
      if constexpr (std::is_invocable_v<G, double, double, double>) {
        const double ch = std::cos(0.5 * t), sh = std::sin(0.5 * t);
        sum += g(x, 2.0 * half * ch * ch, 2.0 * half * sh * sh);
      } else {
        sum += g(x);
      }
    }
    return sum * (std::numbers::pi / static_cast<double>(n));
  };

  QuadResult<T> res;
  std::size_t n = 8;
  T prev = rule(n);
  res.evaluations = n;
  for (int level = 4; level <= cfg.max_level; ++level) {
    n *= 2;
    const T cur = rule(n);
    res.evaluations += n;
    res.value = cur;
    res.error = detail::magnitude(cur - prev);
    res.level = level;
    if (res.error <= cfg.threshold(detail::magnitude(cur))) return res;
    prev = cur;
  }
  throw Error(ErrorCode::NoConvergence,
              "Chebyshev rule did not reach tolerance on [" + std::to_string(lo) + ", " +
                  std::to_string(hi) + "], last difference " + std::to_string(res.error));
}

/// Integral of f over (lo, hi) where f has at worst inverse square root
/// singularities at both endpoints. f is called as f(x, x - lo, hi - x) when
/// it accepts three arguments, else f(x).
template <class F>
auto integrate_chebyshev(F&& f, double lo, double hi, const QuadConfig& cfg = {}) {
  return integrate_chebyshev_weighted(
      [&](double x, double dlo, double dhi) {
        if constexpr (std::is_invocable_v<F, double, double, double>)
          return f(x, dlo, dhi) * std::sqrt(dlo * dhi);
        else
          return f(x) * std::sqrt(dlo * dhi);
      },
      lo, hi, cfg);
}

/// Integral of f over the half line starting at lo, towards +inf when
/// direction > 0 and towards -inf otherwise.
///
/// The ray is compactified by x = lo + direction * scale * (1 - u) / u with
/// u in (0, 1] and the u-integral is taken with the tanh-sinh rule. Written
/// in the tanh-sinh variable the offset is d = scale * exp(-pi sinh t), which
/// is what the loop below evaluates directly. f is called as f(x, d) with the
/// exact offset d = |x - lo| when it accepts two arguments, else f(x).
template <class F>
auto integrate_tail(F&& f, double lo, int direction, const QuadConfig& cfg = {},
                    double scale = 1.0) {
  using T = detail::result_t<F, double, double>;
  cfg.validate();
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail scale must be positive");
  const double dir = direction >= 0 ? 1.0 : -1.0;
  constexpr double pi = std::numbers::pi;

  std::size_t evals = 0;
  // contribution of node t, zero when it under/overflows
  auto term = [&](double t) -> T {
    const double e = -pi * std::sinh(t);
    if (e < -700.0 || e > 700.0) return T{};
    const double d = scale * std::exp(e);
    const double x = lo + dir * d;
    if (!std::isfinite(x)) return T{};
    T v;
    if constexpr (std::is_invocable_v<F, double, double>) {
      v = f(x, d);
    } else {
      if (x == lo) return T{};
      v = f(x);
    }
    ++evals;
    const T out = v * (pi * std::cosh(t) * d);
    if (!std::isfinite(detail::magnitude(out))) return T{};
    return out;
  };

  // sum of term(k h) over k with the given parity step, walking outwards
  // from the origin until contributions are negligible
  auto side_sum = [&](double h, long start, long step, int sign) {
    T s{};
    int small = 0;
    for (long k = start; k < 200000; k += step) {
      const double t = sign * static_cast<double>(k) * h;
      if (std::abs(t) > 7.0) break;
      const T v = term(t);
      s += v;
      if (detail::magnitude(v) <= 1e-18 * std::max(1.0, detail::magnitude(s))) {
        if (++small >= 2) break;
      } else {
        small = 0;
      }
    }
    return s;
  };

  double h = 1.0;
  T sum = term(0.0) + side_sum(h, 1, 1, +1) + side_sum(h, 1, 1, -1);
  T prev = sum * h;
  QuadResult<T> res;
  for (int level = 1; level <= cfg.max_level; ++level) {
    h *= 0.5;
    sum += side_sum(h, 1, 2, +1) + side_sum(h, 1, 2, -1);
    const T cur = sum * h;
    res.value = cur;
    res.error = detail::magnitude(cur - prev);
    res.level = level;
    res.evaluations = evals;
    if (level >= 3 && res.error <= cfg.threshold(detail::magnitude(cur))) return res;
    prev = cur;
  }
  throw Error(ErrorCode::NoConvergence,
              "tail rule did not reach tolerance from " + std::to_string(lo) +
                  ", last difference " + std::to_string(res.error));
}

/// Integral of f along the straight segment from z0 to z1.
///
/// With singular_at_start the path is parametrised as z0 + (z1 - z0) s^2,
/// which absorbs an inverse square root singularity at z0. The parameter
/// range [0, 1] is covered by panels of a 16-point Gauss rule; a panel is
/// halved (its node count doubled) while its value and the sum over its two
/// halves differ by more than its share of the tolerance. Halving is local
/// so that paths grazing an endpoint of E only refine near the graze. f is
/// called as f(zeta, zeta - z0) with the exact offset when it accepts two
/// arguments, else f(zeta). Works for real or complex abscissae.
template <class F, class Z>
auto integrate_segment(F&& f, Z z0, Z z1, bool singular_at_start, const QuadConfig& cfg = {}) {
  using T = detail::result_t<F, Z, Z>;
  using R = std::common_type_t<T, Z>;
  cfg.validate();
  const Z delta = z1 - z0;
  const auto& gl = detail::gauss16();
  const int max_depth = 3 * cfg.max_level;

  std::size_t evals = 0;
  auto panel = [&](double a, double b) {
    R sum{};
    const double width = b - a;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double s = a + gl.x[i] * width;
      const Z offset = singular_at_start ? delta * (s * s) : delta * s;
      const Z zeta = z0 + offset;
      const double jac = singular_at_start ? 2.0 * s : 1.0;
      R v;
      if constexpr (std::is_invocable_v<F, Z, Z>)
        v = f(zeta, offset);
      else
        v = f(zeta);
      sum += v * (gl.w[i] * jac);
    }
    evals += gl.x.size();
    return sum * (delta * width);
  };

  struct Pending {
    double a, b;
    R coarse;
    int depth;
  };

  // seed with four panels so that the magnitude estimate is meaningful
  std::vector<Pending> stack;
  R estimate{};
  for (int p = 3; p >= 0; --p) {
    const double a = 0.25 * p, b = 0.25 * (p + 1);
    const R v = panel(a, b);
    estimate += v;
    stack.push_back({a, b, v, 2});
  }
  const double tol = cfg.threshold(detail::magnitude(estimate));

  QuadResult<R> res;
  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    const double m = 0.5 * (cur.a + cur.b);
    const R left = panel(cur.a, m);
    const R right = panel(m, cur.b);
    const R fine = left + right;
    const double diff = detail::magnitude(fine - cur.coarse);
    res.level = std::max(res.level, cur.depth);
    // width-proportional share, floored so that the few panels per level
    // around a near-singularity are not held to a vanishing share
    const double share = tol * std::max(cur.b - cur.a, 1.0 / 64.0);
    if (diff <= share || diff <= 1e-15 * detail::magnitude(fine)) {
      res.value += fine;
      res.error += diff;
      continue;
    }
    if (cur.depth >= max_depth) {
      throw Error(ErrorCode::NoConvergence,
                  "segment rule did not reach tolerance near parameter " + std::to_string(m) +
                      ", panel difference " + std::to_string(diff));
    }
    stack.push_back({m, cur.b, right, cur.depth + 1});
    stack.push_back({cur.a, m, left, cur.depth + 1});
  }
  res.evaluations = evals;
  return res;
}

/// Complex line integral along [z0, z1].
template <class F>
auto integrate_segment_complex(F&& f, std::complex<double> z0, std::complex<double> z1,
                               bool singular_at_start, const QuadConfig& cfg = {}) {
  return integrate_segment(std::forward<F>(f), z0, z1, singular_at_start, cfg);
}

}  // namespace walsh
