#pragma once

// The conformal map w = Phi(z) from the complement of E onto L with
// Phi(z) = z + O(1/z), evaluated pointwise through g_L(Phi(z)) = g_E(z).
// Off the real axis (and on the rightmost gap) the complex form
//   sum m_j Log(w - a_j) - log cap = int_{b_2l}^z R / sqrt(H)
// is solved by damped Newton; on the other gaps the real equation
// g_L(w) = g_E(z) is solved inside the interval where it has one root.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "walsh/error.hpp"
#include "walsh/green.hpp"
#include "walsh/lemniscatic.hpp"

namespace walsh {

enum class BranchKind { Complex, RealGap, Boundary };
enum class MapStatus { Converged, NearBoundary, Skipped, Failed };

inline std::string_view to_string(BranchKind b) {
  switch (b) {
    case BranchKind::Complex: return "complex";
    case BranchKind::RealGap: return "real_gap";
    case BranchKind::Boundary: return "boundary";
  }
  return "unknown";
}

inline std::string_view to_string(MapStatus s) {
  switch (s) {
    case MapStatus::Converged: return "converged";
    case MapStatus::NearBoundary: return "near_boundary";
    case MapStatus::Skipped: return "skipped";
    case MapStatus::Failed: return "failed";
  }
  return "unknown";
}

struct Branch {
  BranchKind kind = BranchKind::Complex;
  std::size_t index = 0;  // gap k for RealGap, endpoint j for Boundary
};

struct MapResult {
  cdouble z;
  cdouble w;
  double residual = 0.0;
  int iterations = 0;
  Branch branch;
  MapStatus status = MapStatus::Converged;
  std::string message;
};

struct MapConfig {
  double tol = 1e-13;     // relative residual target
  int max_iter = 200;
  double near_boundary = 1e-9;
};

namespace detail {

inline cdouble F1(cdouble w, const LemniscaticDomain& d) {
  cdouble s(-std::log(d.capacity), 0.0);
  for (std::size_t j = 0; j < d.ell(); ++j) s += d.m[j] * std::log(w - d.a[j]);
  return s;
}

inline MapResult phi_complex(cdouble z, cdouble target, cdouble w0, const LemniscaticDomain& d,
                             const MapConfig& cfg) {
  MapResult r;
  r.z = z;
  cdouble w = w0;
  auto residual = [&](cdouble v) { return std::abs(F1(v, d) - target); };
  double res = residual(w);
  const double goal = cfg.tol * std::max(1.0, std::abs(target));
  for (int it = 1; it <= cfg.max_iter; ++it) {
    r.iterations = it;
    if (res <= goal) break;
    const cdouble step = (F1(w, d) - target) / dgL(w, d);
    cdouble trial = w;
    double trial_res = INFINITY;
    double damp = 1.0;
    for (int h = 0; h <= 10; ++h, damp *= 0.5) {
      trial = w - damp * step;
      // Phi preserves each half-plane; crossing the axis lands on a log cut
      if (std::signbit(trial.imag()) != std::signbit(z.imag())) continue;
      trial_res = residual(trial);
      if (trial_res < res) break;
      trial_res = INFINITY;
    }
    if (!(trial_res < res)) break;  // rounding level reached
    const bool tiny = std::abs(trial - w) <= 1e-16 * std::abs(w);
    w = trial;
    res = trial_res;
    if (tiny) break;
  }
  r.w = w;
  r.residual = res;
  if (!(res <= 100.0 * goal))
    throw Error(ErrorCode::NoConvergence, "damped Newton for Phi stalled at residual " +
                                              std::to_string(res));
  return r;
}

}  // namespace detail

/// Phi(z) for z in the closure of the complement of E, except interior
/// points of E.
inline MapResult phi(cdouble z, const WalshData& s, const MapConfig& cfg = {}) {
  const auto& e = s.green.domain;
  const auto& d = s.L;
  const std::size_t ell = e.ell();
  const auto loc = e.locate(z);

  if (loc.kind == Location::Kind::InsideE) {
    for (std::size_t j = 1; j <= 2 * ell; ++j)
      if (z.real() == e.b(j)) {
        MapResult r;
        r.z = z;
        r.w = d.c[j - 1];
        r.branch = {BranchKind::Boundary, j};
        return r;
      }
    throw Error(ErrorCode::InsideE, "Phi is not defined inside E");
  }

  if (loc.kind == Location::Kind::OffAxis || loc.index == ell) {
    MapResult r;
    try {
      r = detail::phi_complex(z, green_complex(z, s.green), z, d, cfg);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NoConvergence || z.imag() == 0.0) throw;
      // Newton from w = z can stall close to the axis. Continue from a
      // height where it converges, halving the height back down to z.
      const double y = z.imag();
      double h = std::copysign(std::max(std::abs(y), e.diameter()), y);
      std::vector<double> heights;
      for (; std::abs(h) > std::abs(y); h *= 0.5) heights.push_back(h);
      heights.push_back(y);
      cdouble w = cdouble(z.real(), heights.front());
      int total = 0;
      for (double yk : heights) {
        const cdouble zk(z.real(), yk);
        r = detail::phi_complex(zk, green_complex(zk, s.green), w, d, cfg);
        w = r.w;
        total += r.iterations;
      }
      r.iterations = total;
    }
    r.branch = loc.kind == Location::Kind::OffAxis ? Branch{BranchKind::Complex, 0}
                                                   : Branch{BranchKind::RealGap, ell};
    if (loc.kind == Location::Kind::OffAxis && std::abs(z.imag()) < cfg.near_boundary) {
      const double x = z.real();
      if (x > e.b(1) - cfg.near_boundary && x < e.b(2 * ell) + cfg.near_boundary) {
        bool near = e.contains(x);
        for (double b : e.endpoints()) near = near || std::abs(x - b) < cfg.near_boundary;
        if (near) r.status = MapStatus::NearBoundary;
      }
    }
    return r;
  }

  // real gap I_k, k < l
  const std::size_t k = loc.index;
  const double x = z.real();
  const double target = green_real(x, s.green);
  auto fd = [&](double v) {
    return std::pair{detail::gL_real(v, d.a, d.m.m, d.capacity) - target,
                     detail::dgL_real(v, d.a, d.m.m)};
  };
  MapResult r;
  r.z = z;
  r.branch = {BranchKind::RealGap, k};
  double lo, hi, x0;
  if (k == 0) {
    hi = d.c[0];
    double step = std::max(d.capacity, hi - x);
    lo = std::min(x, hi - step);
    for (int n = 0; !(fd(lo).first > 0.0); ++n) {
      if (n > 200) throw Error(ErrorCode::BracketFailure, "no bracket on the left ray");
      step *= 2.0;
      lo = hi - step;
    }
    x0 = x;
  } else {
    const double zk = s.green.critical[k - 1];
    const double wk = d.w[k - 1];
    if (x == zk) {
      r.w = wk;
      r.residual = std::abs(fd(wk).first);
      return r;
    }
    if (x < zk) {
      lo = d.c[2 * k - 1];
      hi = wk;
      const double bk = e.b(2 * k);
      x0 = lo + (x - bk) / (zk - bk) * (wk - lo);
    } else {
      lo = wk;
      hi = d.c[2 * k];
      const double bk1 = e.b(2 * k + 1);
      x0 = hi - (bk1 - x) / (bk1 - zk) * (hi - wk);
    }
    // g_E(z) can round to g_L(w_k) very close to z_k
    if (!(fd(wk).first > 0.0)) {
      r.w = wk;
      r.residual = std::abs(fd(wk).first);
      return r;
    }
  }
  int iters = 0;
  const double w = detail::safeguarded_root(fd, lo, hi, x0, cfg.max_iter, &iters);
  r.w = w;
  r.iterations = iters;
  r.residual = std::abs(fd(w).first);
  return r;
}

/// Phi at many points; per-point failures are recorded, never thrown. Points
/// inside E are skipped. Results keep the input order.
inline std::vector<MapResult> phi_grid(const std::vector<cdouble>& zs, const WalshData& s,
                                       const MapConfig& cfg = {}, unsigned threads = 1) {
  std::vector<MapResult> out(zs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = phi(zs[i], s, cfg);
      } catch (const Error& err) {
        out[i].z = zs[i];
        out[i].w = cdouble(NAN, NAN);
        out[i].residual = NAN;
        out[i].status =
            err.code() == ErrorCode::InsideE ? MapStatus::Skipped : MapStatus::Failed;
        out[i].message = err.what();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(zs.size())));
  if (threads <= 1) {
    work(0, zs.size());
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (zs.size() + threads - 1) / threads;
  for (std::size_t b = 0; b < zs.size(); b += chunk)
    pool.emplace_back(work, b, std::min(zs.size(), b + chunk));
  return out;
}

/// int_{b_base}^z R/sqrt(H) - int_{b_2l}^z R/sqrt(H) along straight segments,
/// for z off the real axis. base is a 1-based endpoint index.
inline cdouble branch_offset_check(const GreenData& g, std::size_t base, cdouble z) {
  if (z.imag() == 0.0) throw Error(ErrorCode::PathOnCut, "z must lie off the real axis");
  if (base < 1 || base > 2 * g.ell()) throw Error(ErrorCode::InvalidArgument, "endpoint index");
  const auto from_base = integrate_segment(
      [&](cdouble zeta, cdouble off) { return detail::ratio_complex(g, zeta, base, off); },
      cdouble(g.domain.b(base), 0.0), z, true, g.quad);
  return from_base.value - green_complex(z, g);
}

/// The offset predicted for base b_{2k} or b_{2k+1}: -+ i pi (m_{k+1} + ... + m_l),
/// the sign following Im z.
inline cdouble expected_branch_offset(const ExponentVector& m, std::size_t k, double im_sign) {
  double tail = 0.0;
  for (std::size_t j = k; j < m.size(); ++j) tail += m[j];
  return cdouble(0.0, -(im_sign >= 0 ? 1.0 : -1.0) * std::numbers::pi * tail);
}

struct BoundaryComponent {
  std::size_t center = 0;  // 0-based
  bool sampled = false;
  std::vector<cdouble> points;  // closed: last point repeats the first
  std::string failure;
};

namespace detail {

/// Index of the center reached by steepest descent of g_L from q, where
/// g_L(q) < 0. Descent stays inside {g_L < 0}, so it identifies the
/// component of L's complement containing q.
inline std::size_t descend_to_center(cdouble q, const LemniscaticDomain& d, double scale) {
  cdouble w = q;
  for (int it = 0; it < 20000; ++it) {
    std::size_t near = 0;
    double dist = INFINITY;
    for (std::size_t i = 0; i < d.ell(); ++i) {
      const double r = std::abs(w - d.a[i]);
      if (r < dist) {
        dist = r;
        near = i;
      }
    }
    if (dist < 1e-6 * scale) return near;
    const cdouble grad = std::conj(dgL(w, d));
    w -= 0.25 * dist * grad / std::abs(grad);
  }
  throw Error(ErrorCode::NoConvergence, "steepest descent did not reach a center");
}

}  // namespace detail

/// Traces each component of {g_L = 0} by bisection along rays from its
/// center at uniformly spaced angles. A component whose rays re-enter it
/// after first leaving is reported unsampled.
inline std::vector<BoundaryComponent> sample_boundary_L(const LemniscaticDomain& d,
                                                        std::size_t points_per_component) {
  if (points_per_component < 3)
    throw Error(ErrorCode::InvalidArgument, "need at least three points per component");
  std::vector<BoundaryComponent> out;
  double span = 0.0;
  for (double a : d.a) span = std::max(span, std::abs(a - d.a.front()));
  const double scale = span + d.capacity;
  for (std::size_t j = 0; j < d.ell(); ++j) {
    BoundaryComponent comp;
    comp.center = j;
    double reach = d.capacity;
    for (double a : d.a) reach = std::max(reach, std::abs(a - d.a[j]) + d.capacity);
    try {
      for (std::size_t p = 0; p < points_per_component; ++p) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(p) /
                             static_cast<double>(points_per_component);
        const cdouble dir = std::polar(1.0, theta);
        auto g = [&](double r) { return gL(d.a[j] + r * dir, d); };
        // geometric scan outwards; beyond reach every point is outside L's complement
        const double ratio = 1.02;
        double r = reach * 1e-15;
        while (g(r) > 0.0) r *= 1e-3;
        double prev = r;
        while (g(r) <= 0.0) {
          prev = r;
          r *= ratio;
        }
        double lo = prev, hi = r;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          (g(mid) <= 0.0 ? lo : hi) = mid;
        }
        const double rb = 0.5 * (lo + hi);
        comp.points.push_back(d.a[j] + rb * dir);
        // look for re-entry into the same component before reaching safety
        bool inside = false;
        for (double t = hi * ratio; t < reach; t *= ratio) {
          const bool neg = g(t) <= 0.0;
          if (neg && !inside &&
              detail::descend_to_center(d.a[j] + t * dir, d, scale) == j)
            throw Error(ErrorCode::RayBracketFailure,
                        "ray at angle " + std::to_string(theta) + " re-enters component " +
                            std::to_string(j + 1));
          inside = neg;
        }
      }
      comp.points.push_back(comp.points.front());
      comp.sampled = true;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::RayBracketFailure) throw;
      comp.points.clear();
      comp.failure = err.what();
    }
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace walsh
