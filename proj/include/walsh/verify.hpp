#pragma once

// Regression and property battery shared by the `verify` command and the
// acceptance test binary. Each check reports pass/fail with its worst error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "walsh/equilibrium.hpp"
#include "walsh/green.hpp"
#include "walsh/lemniscatic.hpp"
#include "walsh/walsh_map.hpp"

namespace walsh {

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  QuadConfig quad;
  IterationConfig iter;
  std::uint64_t seed = 410;
  int random_sets = 100;            // per interval count
  std::set<std::string> only;       // empty runs everything
};

/// Components j (1-based) whose center a_j lies outside E_j.
inline std::vector<std::size_t> centers_outside_components(const WalshData& s) {
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= s.L.ell(); ++j) {
    const auto [lo, hi] = s.green.domain.component(j);
    if (!(s.L.a[j - 1] >= lo && s.L.a[j - 1] <= hi)) out.push_back(j);
  }
  return out;
}

/// Largest violation of the identities every solved domain must satisfy:
/// interlacing and ordering (reported as infinity when broken), sum m = 1
/// before renormalisation, sum m_j a_j = alpha, g_L(c_j) = 0 and
/// g_L(w_k) = g_E(z_k).
inline double invariant_violation(const WalshData& s) {
  const auto& L = s.L;
  const std::size_t ell = L.ell();
  if (L.c.size() != 2 * ell || L.w.size() + 1 != ell) return INFINITY;
  for (std::size_t j = 0; j < ell; ++j) {
    if (!(L.c[2 * j] < L.a[j] && L.a[j] < L.c[2 * j + 1])) return INFINITY;
    if (j + 1 < ell && !(L.c[2 * j + 1] < L.w[j] && L.w[j] < L.c[2 * j + 2] &&
                         L.a[j] < L.w[j] && L.w[j] < L.a[j + 1]))
      return INFINITY;
  }
  double worst = std::abs(s.m.defect);
  double sum = -s.green.alpha;
  for (std::size_t j = 0; j < ell; ++j) sum += L.m[j] * L.a[j];
  worst = std::max(worst, std::abs(sum));
  for (double c : L.c) worst = std::max(worst, std::abs(gL(c, L)));
  for (std::size_t k = 0; k + 1 < ell; ++k)
    worst = std::max(worst, std::abs(gL(L.w[k], L) - s.green.green_at_critical[k]));
  return worst;
}

namespace verify_sets {

inline IntervalUnion ex44() { return parse_domain({{-1.0, -0.3}, {0.1, 1.0}}); }
inline IntervalUnion ex55() { return parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}}); }
inline IntervalUnion final_remark() { return parse_domain({{-1.0, 1.0}, {1.2, 1.4}}); }

/// E_0 = [0, 1], E_{k+1} = E_k / 3 united with 2/3 + E_k / 3.
inline IntervalUnion cantor(int level) {
  std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
  for (int k = 0; k < level; ++k) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : iv) next.push_back({a / 3.0, b / 3.0});
    for (auto [a, b] : iv) next.push_back({2.0 / 3.0 + a / 3.0, 2.0 / 3.0 + b / 3.0});
    iv = std::move(next);
  }
  return parse_domain(iv);
}

/// Sorted uniform endpoints on [-1, 1], redrawn while any component or gap
/// is shorter than 1e-3.
inline IntervalUnion random_set(std::size_t ell, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(2 * ell);
  for (;;) {
    for (double& v : b) v = u(rng);
    std::sort(b.begin(), b.end());
    bool ok = true;
    for (std::size_t k = 1; k < b.size(); ++k) ok = ok && b[k] - b[k - 1] >= 1e-3;
    if (ok) return IntervalUnion(b);
  }
}

/// Sets with known parameters, each a polynomial pre-image of [-1, 1].
struct ClosedForm {
  std::string label;
  IntervalUnion e;
  std::vector<double> a;
  std::vector<double> m;
  double cap;
  int expected_steps;
};

/// [-b4, -b3] u [b3, b4].
inline ClosedForm symmetric_two(double b3, double b4) {
  const double a = 0.5 * (b3 + b4);
  return {"(i) b3=" + std::to_string(b3) + " b4=" + std::to_string(b4),
          parse_domain({{-b4, -b3}, {b3, b4}}), {-a, a}, {0.5, 0.5},
          0.5 * std::sqrt(b4 * b4 - b3 * b3), 1};
}

/// [-1, b2] u [b3, 1] with b2,3 = (1 - t^2)/2 -+ t: the pre-image under
/// P(x) = p (x + 1)(x - b2)(x - b3) - 1, p = 4 / (1 - t^2)^2. Then m = (2/3, 1/3),
/// cap = (1 / (2p))^(1/3), alpha = -t^2/3, z_1 = (3 - t^2)/6 and
/// g_E(z_1) = arccosh|P(z_1)| / 3; the centers follow from the two-interval
/// formula.
inline ClosedForm two_intervals(double t) {
  const double s = 1.0 - t * t;
  const double b2 = 0.5 * s - t, b3 = 0.5 * s + t;
  const double p = 4.0 / (s * s);
  const double z1 = (3.0 - t * t) / 6.0;
  const double P = p * (z1 + 1.0) * (z1 - b2) * (z1 - b3) - 1.0;
  const double g = std::acosh(std::abs(P)) / 3.0;
  const double cap = std::cbrt(1.0 / (2.0 * p));
  const double m1 = 2.0 / 3.0, m2 = 1.0 / 3.0;
  const double alpha = -t * t / 3.0;
  const double beta = cap / (std::pow(m1, m1) * std::pow(m2, m2)) * std::exp(g);
  return {"(ii) alpha=" + std::to_string(t), parse_domain({{-1.0, b2}, {b3, 1.0}}),
          {alpha - m2 * beta, alpha + m1 * beta}, {m1, m2}, cap, 4};
}

/// [-1, -(1 - t)] u [-t, t] u [1 - t, 1]: the pre-image under
/// P(x) = (x^3 - (1 - t + t^2) x) / (t (1 - t)). m_j = 1/3, cap^3 = t(1 - t)/2,
/// centers (-a, 0, a) with g_L(a / sqrt 3) = g_E(z_2), z_2^2 = (1 - t + t^2)/3,
/// which gives a^3 = (3 sqrt 3 / 2) cap^3 (|P(z_2)| + sqrt(P(z_2)^2 - 1)).
inline ClosedForm three_intervals(double t) {
  const double q = 1.0 - t + t * t;
  const double z2 = std::sqrt(q / 3.0);
  const double P = (z2 * z2 * z2 - q * z2) / (t * (1.0 - t));
  const double cap3 = 0.5 * t * (1.0 - t);
  const double a = std::cbrt(1.5 * std::sqrt(3.0) * cap3 * (std::abs(P) + std::sqrt(P * P - 1.0)));
  return {"(iii) alpha=" + std::to_string(t),
          parse_domain({{-1.0, -(1.0 - t)}, {-t, t}, {1.0 - t, 1.0}}),
          {-a, 0.0, a}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::cbrt(cap3), 4};
}

}  // namespace verify_sets

namespace detail {

class Reporter {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& s) { notes_ << (notes_.tellp() > 0 ? ", " : "") << s; }
  bool pass() const { return pass_; }
  std::string detail() const {
    std::string out = notes_.str();
    if (!pass_) out += (out.empty() ? "" : " | ") + std::string("failed: ") + failures_.str();
    return out;
  }

 private:
  bool pass_ = true;
  std::ostringstream notes_, failures_;
};

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline CheckResult timed(int criterion, std::string name, const std::function<void(Reporter&)>& body) {
  CheckResult r;
  r.criterion = criterion;
  r.name = std::move(name);
  Reporter rep;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(rep);
  } catch (const std::exception& err) {
    rep.expect(false, std::string("exception: ") + err.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = rep.pass();
  r.detail = rep.detail();
  return r;
}

}  // namespace detail

inline CheckResult check_ex44(const VerifyOptions& o) {
  return detail::timed(1, "ex44", [&](detail::Reporter& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = solve(verify_sets::ex44(), o.quad, o.iter);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double beta = (s.L.a[1] - s.L.a[0]);
    const std::pair<double, double> vals[] = {
        {s.green.critical[0], -0.10209}, {s.m[0], 0.46710}, {s.m[1], 0.53289},
        {s.green.alpha, 0.00209}, {s.green.green_at_critical[0], 0.20383},
        {s.green.capacity(), 0.48978}, {beta, 1.19846}, {s.L.a[0], -0.63655},
        {s.L.a[1], 0.56190}};
    const char* names[] = {"z1", "m1", "m2", "alpha", "gE(z1)", "cap", "beta", "a1", "a2"};
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double err = std::abs(vals[i].first - vals[i].second);
      worst = std::max(worst, err);
      rep.expect(err <= 5e-5, std::string(names[i]) + " off by " + detail::sci(err));
    }
    rep.note("max error " + detail::sci(worst));
    rep.note("solve " + detail::sci(secs) + " s");
    rep.expect(secs < 1.0, "runtime above 1 s");
  });
}

inline CheckResult check_ex55(const VerifyOptions& o) {
  return detail::timed(2, "ex55", [&](detail::Reporter& rep) {
    const auto g = compute_green(verify_sets::ex55(), o.quad);
    const auto m = exponents(g);
    CenterDiagnostics dg, d3;
    const auto ag = centers_general(g, m, o.iter, &dg);
    const auto a3 = centers_three(g, m, &d3);
    const double m_ref[] = {0.3601, 0.1772, 0.4627};
    const double a_ref[] = {-1.4101, -0.1950, 1.3896};
    double worst = std::abs(g.capacity() - 1.0458), agree = 0.0;
    for (int j = 0; j < 3; ++j) {
      worst = std::max({worst, std::abs(m[j] - m_ref[j]), std::abs(ag[j] - a_ref[j])});
      agree = std::max(agree, std::abs(ag[j] - a3[j]));
    }
    rep.note("max error " + detail::sci(worst));
    rep.note("system vs iteration " + detail::sci(agree));
    rep.note("steps " + std::to_string(dg.iterations));
    rep.expect(worst <= 5e-5, "published values missed");
    rep.expect(agree <= 1e-7, "the two center solvers disagree");
    rep.expect(dg.iterations <= 4, "too many outer steps");
  });
}

inline CheckResult check_cantor(const VerifyOptions& o) {
  return detail::timed(3, "cantor", [&](detail::Reporter& rep) {
    const double ref[] = {0.228430704425168, 0.224752818755217};
    const int max_steps[] = {2, 3};
    for (int level : {2, 3}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto s = solve(verify_sets::cantor(level), o.quad, o.iter);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double rel = std::abs(s.green.capacity() - ref[level - 2]) / ref[level - 2];
      const std::string tag = "E" + std::to_string(level);
      rep.note(tag + " rel error " + detail::sci(rel) + " steps " +
               std::to_string(s.L.diagnostics.iterations) + " " + detail::sci(secs) + " s");
      // 11 significant digits
      rep.expect(rel <= 5e-12, tag + " capacity misses 11 significant digits");
      rep.expect(s.L.diagnostics.iterations <= max_steps[level - 2], tag + " too many steps");
      rep.expect(secs < 5.0, tag + " runtime above 5 s");
    }
  });
}

inline CheckResult check_table1(const VerifyOptions& o) {
  return detail::timed(4, "table1", [&](detail::Reporter& rep) {
    for (const auto& cf : {verify_sets::symmetric_two(1.0, 2.0), verify_sets::two_intervals(0.05),
                           verify_sets::three_intervals(0.4)}) {
      const auto g = compute_green(cf.e, o.quad);
      const auto m = exponents(g);
      CenterDiagnostics diag;
      const auto a = centers_general(g, m, o.iter, &diag);
      double ea = 0.0, em = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        ea = std::max(ea, std::abs(a[j] - cf.a[j]));
        em = std::max(em, std::abs(m[j] - cf.m[j]));
      }
      rep.note(cf.label + ": steps " + std::to_string(diag.iterations) + " a err " +
               detail::sci(ea) + " m err " + detail::sci(em));
      rep.expect(std::abs(diag.iterations - cf.expected_steps) <= 1, cf.label + " step count");
      rep.expect(ea < 1e-10 && em < 1e-10, cf.label + " accuracy");
    }
  });
}

inline CheckResult check_random(const VerifyOptions& o) {
  return detail::timed(5, "random", [&](detail::Reporter& rep) {
    std::mt19937_64 rng(o.seed);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t ell : {5u, 10u}) {
      int max_steps = 0, failures = 0;
      double worst = 0.0;
      for (int n = 0; n < o.random_sets; ++n) {
        const auto e = verify_sets::random_set(ell, rng);
        try {
          const auto s = solve(e, o.quad, o.iter);
          max_steps = std::max(max_steps, s.L.diagnostics.iterations);
          const double v = invariant_violation(s);
          worst = std::max(worst, v);
          if (!(v <= 1e-10) || s.L.diagnostics.iterations > 7) ++failures;
        } catch (const Error&) {
          ++failures;
        }
      }
      rep.note(std::to_string(ell) + " intervals: max steps " + std::to_string(max_steps) +
               " worst invariant " + detail::sci(worst));
      rep.expect(failures == 0, std::to_string(failures) + " sets with " + std::to_string(ell) +
                                    " intervals failed");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.expect(secs < 60.0, "runtime above 60 s");
  });
}

inline CheckResult check_map(const VerifyOptions& o) {
  return detail::timed(6, "map", [&](detail::Reporter& rep) {
    // (a) one interval
    {
      const auto s = solve(parse_domain({{-1.0, 1.0}}), o.quad, o.iter);
      std::mt19937_64 rng(o.seed);
      std::uniform_real_distribution<double> u(-3.0, 3.0);
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const cdouble z(u(rng), u(rng));
        const cdouble exact = 0.5 * (z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0));
        worst = std::max(worst, std::abs(phi(z, s).w - exact));
      }
      rep.note("(a) " + detail::sci(worst));
      rep.expect(worst <= 1e-10, "(a) Joukowski map");
    }
    for (const auto& e : {verify_sets::ex44(), verify_sets::ex55()}) {
      const auto s = solve(e, o.quad, o.iter);
      const std::string tag = " l=" + std::to_string(e.ell());
      // (b) Green identity on an off-axis grid
      double worst = 0.0;
      const double lo = e.b(1) - 0.5, hi = e.b(2 * e.ell()) + 0.5;
      for (int i = 0; i < 40; ++i)
        for (int k = 0; k < 40; ++k) {
          const cdouble z(lo + (hi - lo) * (i + 0.5) / 40.0, -1.5 + 3.0 * (k + 0.5) / 40.0);
          worst = std::max(worst, std::abs(green_value(z, s.green) - gL(phi(z, s).w, s.L)));
        }
      rep.note("(b)" + tag + " " + detail::sci(worst));
      rep.expect(worst < 1e-9, "(b) Green identity" + tag);
      // (c) endpoints
      double cworst = 0.0;
      for (std::size_t j = 1; j <= 2 * e.ell(); ++j) {
        const cdouble w = phi(e.b(j), s).w;
        cworst = std::max({cworst, std::abs(w - s.L.c[j - 1]), std::abs(gL(w, s.L))});
      }
      rep.note("(c)" + tag + " " + detail::sci(cworst));
      rep.expect(cworst <= 1e-9, "(c) Phi(b_j) = c_j" + tag);
      // (d) monotone on every gap
      bool monotone = true;
      for (std::size_t k = 0; k <= e.ell(); ++k) {
        const auto gap = e.gap(k);
        const double a = k == 0 ? gap.upper - 3.0 : gap.lower;
        const double b = k == e.ell() ? gap.lower + 3.0 : gap.upper;
        double prev = -INFINITY;
        for (int i = 1; i <= 100; ++i) {
          const cdouble w = phi(a + (b - a) * i / 101.0, s).w;
          monotone = monotone && w.imag() == 0.0 && w.real() > prev;
          prev = w.real();
        }
      }
      rep.expect(monotone, "(d) monotonicity" + tag);
      // (e) branch offsets from both ends of every gap
      double oworst = 0.0;
      for (std::size_t k = 0; k <= e.ell(); ++k)
        for (std::size_t base : {2 * k, 2 * k + 1}) {
          if (base < 1 || base > 2 * e.ell()) continue;
          for (cdouble z : {cdouble(0.3, 1.0), cdouble(0.3, -1.0), cdouble(-0.7, 0.25)})
            oworst = std::max(oworst, std::abs(branch_offset_check(s.green, base, z) -
                                               expected_branch_offset(s.m, k, z.imag())));
        }
      rep.note("(e)" + tag + " " + detail::sci(oworst));
      rep.expect(oworst <= 1e-9, "(e) branch offsets" + tag);
    }
  });
}

inline CheckResult check_contour(const VerifyOptions& o) {
  return detail::timed(7, "contour", [&](detail::Reporter& rep) {
    std::vector<IntervalUnion> sets = {verify_sets::ex44(), verify_sets::ex55(),
                                       verify_sets::cantor(2), verify_sets::cantor(3),
                                       verify_sets::final_remark()};
    for (const auto& cf : {verify_sets::symmetric_two(1.0, 2.0), verify_sets::two_intervals(0.05),
                           verify_sets::three_intervals(0.4)})
      sets.push_back(cf.e);
    double worst = 0.0;
    for (const auto& e : sets) {
      const auto g = compute_green(e, o.quad);
      const auto m = exponents(g);
      for (std::size_t j = 1; j <= e.ell(); ++j)
        worst = std::max(worst, std::abs(exponents_contour_oracle(g, j, default_pad(e, j)) - m[j - 1]));
    }
    rep.note(std::to_string(sets.size()) + " sets, max difference " + detail::sci(worst));
    rep.expect(worst <= 1e-8, "contour and equilibrium masses disagree");
  });
}

inline CheckResult check_final_remark(const VerifyOptions& o) {
  return detail::timed(8, "remark", [&](detail::Reporter& rep) {
    const auto s = solve(verify_sets::final_remark(), o.quad, o.iter);
    const double e1 = std::abs(s.L.a[0] - -0.0677), e2 = std::abs(s.L.a[1] - 1.0862);
    std::ostringstream os;
    os.precision(10);
    os << "a1 = " << s.L.a[0] << " a2 = " << s.L.a[1];
    rep.note(os.str());
    rep.expect(e1 <= 5e-5, "a1 off by " + detail::sci(e1));
    rep.expect(e2 <= 5e-5, "a2 off by " + detail::sci(e2));
    const auto outside = centers_outside_components(s);
    rep.expect(outside == std::vector<std::size_t>{2}, "a2 should be flagged outside E_2 alone");
    if (outside == std::vector<std::size_t>{2}) rep.note("a2 flagged outside E_2");
  });
}

inline const std::vector<std::pair<std::string, std::function<CheckResult(const VerifyOptions&)>>>&
acceptance_checks() {
  static const std::vector<std::pair<std::string, std::function<CheckResult(const VerifyOptions&)>>>
      checks = {{"ex44", check_ex44},     {"ex55", check_ex55},       {"cantor", check_cantor},
                {"table1", check_table1}, {"random", check_random},   {"map", check_map},
                {"contour", check_contour}, {"remark", check_final_remark}};
  return checks;
}

inline std::vector<CheckResult> run_acceptance(const VerifyOptions& o) {
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : acceptance_checks())
    if (o.only.empty() || o.only.count(name)) out.push_back(fn(o));
  return out;
}

}  // namespace walsh
