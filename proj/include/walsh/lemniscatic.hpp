#pragma once

// The lemniscatic domain L = {w : prod |w - a_j|^{m_j} > cap}, its Green's
// function g_L(w) = sum m_j log|w - a_j| - log cap, the critical points w_k
// of g_L and the real boundary points c_j. The centers a_j are determined by
// g_L(w_k) = g_E(z_k) together with sum m_j a_j = alpha.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "walsh/equilibrium.hpp"
#include "walsh/error.hpp"
#include "walsh/green.hpp"

namespace walsh {

enum class CenterMethod { Single, Explicit, System, Iteration };

inline std::string_view to_string(CenterMethod m) {
  switch (m) {
    case CenterMethod::Single: return "single";
    case CenterMethod::Explicit: return "explicit";
    case CenterMethod::System: return "system";
    case CenterMethod::Iteration: return "iteration";
  }
  return "unknown";
}

struct CenterDiagnostics {
  CenterMethod method = CenterMethod::Single;
  // center iteration: the loop index k at which the stopping test passed, so the
  // number of step-1 solves is iterations + 1. Newton steps for the system.
  int iterations = 0;
  std::vector<double> step_sizes;   // max |a^[k+1] - a^[k]| per outer step
  std::vector<int> inner_iterations;
  double residual = 0.0;            // final max residual of the defining system
};

struct LemniscaticDomain {
  std::vector<double> a;  // centers a_1 < ... < a_l
  ExponentVector m;
  double capacity = 0.0;
  std::vector<double> w;  // critical points of g_L, a_k < w_k < a_{k+1}
  std::vector<double> c;  // real zeros of g_L, c_1 < a_1 < c_2 < c_3 < a_2 < ...
  CenterDiagnostics diagnostics;

  std::size_t ell() const { return a.size(); }
};

namespace detail {

inline double gL_real(double x, std::span<const double> a, std::span<const double> m, double cap) {
  double s = -std::log(cap);
  for (std::size_t j = 0; j < a.size(); ++j) s += m[j] * std::log(std::abs(x - a[j]));
  return s;
}

inline double dgL_real(double x, std::span<const double> a, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += m[j] / (x - a[j]);
  return s;
}

/// Root of a monotone function on (lo, hi) where f(lo) and f(hi) have
/// opposite signs; Newton steps with a bisection fallback. fd returns the
/// value and derivative.
template <class FD>
double safeguarded_root(FD&& fd, double lo, double hi, double x0, int max_iter, int* iters = nullptr) {
  double flo = fd(lo).first;
  const bool lo_negative = flo < 0.0;
  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  for (int it = 1; it <= max_iter; ++it) {
    const auto [f, d] = fd(x);
    if (iters) *iters = it;
    if (f == 0.0) return x;
    if ((f < 0.0) == lo_negative)
      lo = x;
    else
      hi = x;
    double next = (d != 0.0 && std::isfinite(d)) ? x - f / d : NAN;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 2e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 4e-16 * std::max(1.0, std::abs(x)))
      return x;
  }
  throw Error(ErrorCode::NoConvergence, "safeguarded root search did not settle");
}

inline void check_centers(std::span<const double> a) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!std::isfinite(a[j]) || (j > 0 && !(a[j - 1] < a[j])))
      throw Error(ErrorCode::OrderViolation, "centers are not strictly increasing");
}

}  // namespace detail

/// g_L(w) = sum m_j log|w - a_j| - log cap.
inline double gL(cdouble w, const LemniscaticDomain& d) {
  double s = -std::log(d.capacity);
  for (std::size_t j = 0; j < d.ell(); ++j) {
    const double r = std::abs(w - d.a[j]);
    if (r == 0.0) throw Error(ErrorCode::PoleAtCenter, "g_L is singular at a center");
    s += d.m[j] * std::log(r);
  }
  return s;
}

/// 2 d/dw g_L(w) = sum m_j / (w - a_j).
inline cdouble dgL(cdouble w, const LemniscaticDomain& d) {
  cdouble s(0.0, 0.0);
  for (std::size_t j = 0; j < d.ell(); ++j) {
    if (w == cdouble(d.a[j], 0.0)) throw Error(ErrorCode::PoleAtCenter, "g_L is singular at a center");
    s += d.m[j] / (w - d.a[j]);
  }
  return s;
}

/// Zeros of sum m_j / (w - a_j) between consecutive centers. On each
/// interval the function falls monotonically from +inf to -inf.
inline std::vector<double> crit_points_L(std::span<const double> a, std::span<const double> m) {
  detail::check_centers(a);
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const double lo = a[k], hi = a[k + 1];
    auto fd = [&](double x) {
      double f = 0.0, d = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double q = 1.0 / (x - a[j]);
        f += m[j] * q;
        d -= m[j] * q * q;
      }
      return std::pair{f, d};
    };
    // guess from the two nearest poles: m_k/(x-a_k) + m_{k+1}/(x-a_{k+1}) = 0
    const double guess = (m[k + 1] * lo + m[k] * hi) / (m[k] + m[k + 1]);
    const double shrink = 1e-15 * (hi - lo);
    const double in_lo = std::max(lo + shrink, std::nextafter(lo, hi));
    const double in_hi = std::min(hi - shrink, std::nextafter(hi, lo));
    if (!(fd(in_lo).first > 0.0 && fd(in_hi).first < 0.0))
      throw Error(ErrorCode::RootNotBracketed, "no critical point between centers");
    out.push_back(detail::safeguarded_root(fd, in_lo, in_hi, guess, 200));
  }
  return out;
}

inline std::vector<double> crit_points_L(const LemniscaticDomain& d) {
  return crit_points_L(d.a, d.m.m);
}

/// Real zeros of g_L: one left of a_1, one right of a_l, and one on each side
/// of every critical point.
inline std::vector<double> boundary_abscissae(std::span<const double> a, std::span<const double> m,
                                              double cap, std::span<const double> w) {
  const std::size_t ell = a.size();
  auto fd = [&](double x) {
    return std::pair{detail::gL_real(x, a, m, cap), detail::dgL_real(x, a, m)};
  };
  auto outer = [&](double center, double dir) {
    double step = cap;
    double far = center + dir * step;
    for (int k = 0; fd(far).first <= 0.0; ++k) {
      if (k > 200) throw Error(ErrorCode::BracketFailure, "no sign change of g_L on an outer ray");
      step *= 2.0;
      far = center + dir * step;
    }
    const double tiny = 1e-15 * std::max(1.0, std::abs(center)) + 1e-300;
    const double lo = dir < 0 ? far : center + tiny;
    const double hi = dir < 0 ? center - tiny : far;
    return detail::safeguarded_root(fd, lo, hi, center + dir * cap, 200);
  };
  std::vector<double> c;
  c.push_back(outer(a.front(), -1.0));
  for (std::size_t k = 0; k + 1 < ell; ++k) {
    if (!(fd(w[k]).first > 0.0))
      throw Error(ErrorCode::BracketFailure,
                  "g_L is not positive at critical point " + std::to_string(k + 1));
    const double tl = 1e-15 * std::max(1.0, std::abs(a[k])) + 1e-300;
    const double tr = 1e-15 * std::max(1.0, std::abs(a[k + 1])) + 1e-300;
    c.push_back(detail::safeguarded_root(fd, a[k] + tl, w[k], 0.5 * (a[k] + w[k]), 200));
    c.push_back(detail::safeguarded_root(fd, w[k], a[k + 1] - tr, 0.5 * (w[k] + a[k + 1]), 200));
  }
  c.push_back(outer(a.back(), +1.0));
  return c;
}

inline std::vector<double> boundary_abscissae(const LemniscaticDomain& d) {
  return boundary_abscissae(d.a, d.m.m, d.capacity, d.w);
}

/// Explicit centers for two intervals:
///   beta = cap / (m_1^m_1 m_2^m_2) exp(g_E(z_1)), a_1 = alpha - m_2 beta,
///   a_2 = alpha + m_1 beta.
inline std::vector<double> centers_two(const GreenData& g, const ExponentVector& m) {
  if (g.ell() != 2) throw Error(ErrorCode::InvalidArgument, "centers_two needs two intervals");
  const double m1 = m[0], m2 = m[1];
  const double beta =
      g.capacity() / (std::pow(m1, m1) * std::pow(m2, m2)) * std::exp(g.green_at_critical[0]);
  return {g.alpha - m2 * beta, g.alpha + m1 * beta};
}

namespace detail {

/// Newton on G(a) = 0 with backtracking on the residual norm. jac fills the
/// row-major Jacobian. Returns the number of iterations used.
template <class Residual, class Jacobian>
int damped_newton(std::vector<double>& a, Residual&& res, Jacobian&& jac, int max_iter,
                  double* final_residual) {
  const std::size_t n = a.size();
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };
  double scale = 1.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  std::vector<double> r = res(a);
  double rn = norm(r);
  for (int it = 1; it <= max_iter; ++it) {
    if (rn == 0.0) {
      *final_residual = 0.0;
      return it - 1;
    }
    std::vector<double> j(n * n);
    jac(a, j);
    std::vector<double> step = r;
    if (!(solve_dense(j, step, n) > 0.0))
      throw Error(ErrorCode::SingularSystem, "singular Jacobian in center solve");
    double t = 1.0;
    std::vector<double> trial(n);
    std::vector<double> rt;
    double rtn = INFINITY;
    for (int h = 0; h <= 20; ++h, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = a[i] - t * step[i];
      bool ordered = true;
      for (std::size_t i = 1; i < n; ++i) ordered = ordered && trial[i - 1] < trial[i];
      if (!ordered) continue;
      rt = res(trial);
      rtn = norm(rt);
      if (rtn < rn) break;
    }
    const double dn = t * norm(step);
    if (!(rtn < rn)) {
      // no decrease at any damping: the residual is at rounding level
      *final_residual = rn;
      if (rn <= 1e-11) return it - 1;
      throw Error(ErrorCode::NoConvergence,
                  "Newton iteration stalled at residual " + std::to_string(rn));
    }
    a = trial;
    r = std::move(rt);
    rn = rtn;
    if (dn <= 1e-15 * scale) {
      *final_residual = rn;
      return it;
    }
  }
  throw Error(ErrorCode::NoConvergence, "Newton iteration hit its iteration limit");
}

inline std::vector<double> midpoints(const IntervalUnion& e) {
  std::vector<double> a;
  for (std::size_t j = 1; j <= e.ell(); ++j) {
    const auto [lo, hi] = e.component(j);
    a.push_back(0.5 * (lo + hi));
  }
  return a;
}

}  // namespace detail

/// Three intervals: Newton on the system g_L(w_i(a)) = g_E(z_i), i = 1, 2,
/// sum m_j a_j = alpha, where w_1(a), w_2(a) are the explicit roots of
/// sum_j m_j prod_{i != j} (w - a_i).
inline std::vector<double> centers_three(const GreenData& g, const ExponentVector& m,
                                         CenterDiagnostics* diag = nullptr) {
  if (g.ell() != 3) throw Error(ErrorCode::InvalidArgument, "centers_three needs three intervals");
  const double cap = g.capacity();
  auto crit = [&](const std::vector<double>& a) {
    const double b = -(m[0] * (a[1] + a[2]) + m[1] * (a[0] + a[2]) + m[2] * (a[0] + a[1]));
    const double c = m[0] * a[1] * a[2] + m[1] * a[0] * a[2] + m[2] * a[0] * a[1];
    const double disc = b * b - 4.0 * c;
    if (!(disc > 0.0)) throw Error(ErrorCode::OrderViolation, "complex critical points of g_L");
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double w1 = q, w2 = c / q;
    if (w1 > w2) std::swap(w1, w2);
    return std::pair{w1, w2};
  };
  auto res = [&](const std::vector<double>& a) {
    const auto [w1, w2] = crit(a);
    return std::vector<double>{
        detail::gL_real(w1, a, m.m, cap) - g.green_at_critical[0],
        detail::gL_real(w2, a, m.m, cap) - g.green_at_critical[1],
        m[0] * a[0] + m[1] * a[1] + m[2] * a[2] - g.alpha};
  };
  // dg_L(w_i) = 0, so the chain rule through w_i(a) drops out
  auto jac = [&](const std::vector<double>& a, std::vector<double>& j) {
    const auto [w1, w2] = crit(a);
    const double w[] = {w1, w2};
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < 3; ++k) j[i * 3 + k] = -m[k] / (w[i] - a[k]);
    for (std::size_t k = 0; k < 3; ++k) j[6 + k] = m[k];
  };
  std::vector<double> a = detail::midpoints(g.domain);
  double residual = 0.0;
  const int iters = detail::damped_newton(a, res, jac, 100, &residual);
  detail::check_centers(a);
  if (diag) {
    diag->method = CenterMethod::System;
    diag->iterations = iters;
    diag->residual = residual;
  }
  return a;
}

struct IterationConfig {
  double abstol = 1e-13;
  double reltol = 1e-13;
  int max_outer = 50;

  void validate() const {
    if (!(abstol > 0.0) || !(reltol > 0.0) || max_outer < 1)
      throw Error(ErrorCode::InvalidArgument, "iteration tolerances must be positive");
  }
};

/// Fixed-point iteration for the centers. Starting from component midpoints a^[0] and gap midpoints
/// w^[0], each step solves
///   g_L(w_i^[k]) = g_E(z_i), i = 1..l-1,   sum m_j a_j = alpha
/// for a^[k+1] by Newton warm-started at a^[k], then recomputes w^[k+1] as
/// the critical points of g_L for a^[k+1].
inline std::vector<double> centers_general(const GreenData& g, const ExponentVector& m,
                                           const IterationConfig& it = {},
                                           CenterDiagnostics* diag = nullptr) {
  it.validate();
  const auto& e = g.domain;
  const std::size_t ell = e.ell();
  if (ell < 2) throw Error(ErrorCode::InvalidArgument, "the center iteration needs at least two intervals");
  const double cap = g.capacity();

  std::vector<double> a = detail::midpoints(e);
  std::vector<double> w;
  for (std::size_t k = 1; k < ell; ++k) w.push_back(0.5 * (e.b(2 * k) + e.b(2 * k + 1)));

  CenterDiagnostics local;
  local.method = CenterMethod::Iteration;
  for (int k = 0; k < it.max_outer; ++k) {
    auto res = [&](const std::vector<double>& x) {
      std::vector<double> r(ell);
      for (std::size_t i = 0; i + 1 < ell; ++i)
        r[i] = detail::gL_real(w[i], x, m.m, cap) - g.green_at_critical[i];
      double s = -g.alpha;
      for (std::size_t j = 0; j < ell; ++j) s += m[j] * x[j];
      r[ell - 1] = s;
      return r;
    };
    auto jac = [&](const std::vector<double>& x, std::vector<double>& j) {
      for (std::size_t i = 0; i + 1 < ell; ++i)
        for (std::size_t k = 0; k < ell; ++k) j[i * ell + k] = -m[k] / (w[i] - x[k]);
      for (std::size_t k = 0; k < ell; ++k) j[(ell - 1) * ell + k] = m[k];
    };
    std::vector<double> next = a;
    double residual = 0.0;
    local.inner_iterations.push_back(detail::damped_newton(next, res, jac, 100, &residual));
    detail::check_centers(next);

    bool converged = true;
    double step = 0.0;
    for (std::size_t j = 0; j < ell; ++j) {
      const double d = std::abs(next[j] - a[j]);
      step = std::max(step, d);
      if (!(d < it.abstol + it.reltol * std::abs(a[j]))) converged = false;
    }
    local.step_sizes.push_back(step);
    a = std::move(next);
    w = crit_points_L(a, m.m);
    local.iterations = k;
    local.residual = residual;
    if (converged) {
      if (diag) *diag = local;
      return a;
    }
  }
  if (diag) *diag = local;
  throw Error(ErrorCode::MaxIterExceeded,
              "center iteration did not converge in " + std::to_string(it.max_outer) + " steps");
}

/// l = 1: a_1 = alpha; l = 2: explicit formula; l >= 3: the fixed-point iteration.
inline std::vector<double> centers(const GreenData& g, const ExponentVector& m,
                                   const IterationConfig& it = {},
                                   CenterDiagnostics* diag = nullptr) {
  switch (g.ell()) {
    case 1:
      if (diag) *diag = CenterDiagnostics{CenterMethod::Single, 0, {}, {}, 0.0};
      return {g.alpha};
    case 2:
      if (diag) *diag = CenterDiagnostics{CenterMethod::Explicit, 0, {}, {}, 0.0};
      return centers_two(g, m);
    default:
      return centers_general(g, m, it, diag);
  }
}

/// Completes a LemniscaticDomain from its centers.
inline LemniscaticDomain make_domain(std::vector<double> a, const ExponentVector& m, double cap,
                                     CenterDiagnostics diag = {}) {
  detail::check_centers(a);
  LemniscaticDomain d;
  d.a = std::move(a);
  d.m = m;
  d.capacity = cap;
  d.diagnostics = std::move(diag);
  d.w = crit_points_L(d);
  d.c = boundary_abscissae(d);
  return d;
}

/// The full pipeline for a set E: Green's function data, exponents and L.
struct WalshData {
  GreenData green;
  ExponentVector m;
  LemniscaticDomain L;
};

inline WalshData solve(const IntervalUnion& e, const QuadConfig& quad = {},
                       const IterationConfig& it = {}) {
  WalshData out;
  out.green = compute_green(e, quad);
  out.m = exponents(out.green);
  CenterDiagnostics diag;
  auto a = centers(out.green, out.m, it, &diag);
  out.L = make_domain(std::move(a), out.m, out.green.capacity(), std::move(diag));
  return out;
}

}  // namespace walsh
