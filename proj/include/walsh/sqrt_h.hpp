#pragma once

// The branch of sqrt(H(z)), H(z) = prod_j (z - b_j), that behaves like z^l at
// infinity and is analytic off E.

#include <cmath>
#include <complex>
#include <cstddef>

#include "walsh/error.hpp"
#include "walsh/interval_domain.hpp"

namespace walsh {

/// Sign of sqrt(H) on gap I_k: (-1)^(l-k).
constexpr double gap_sign(std::size_t ell, std::size_t k) { return (ell - k) % 2 == 0 ? 1.0 : -1.0; }

/// sqrt(H(z)) as the product of principal square roots sqrt(z - b_j).
/// Real arguments are taken with imaginary part +0; points on E are rejected.
inline cdouble sqrtH(const IntervalUnion& e, cdouble z) {
  if (z.imag() == 0.0) {
    if (e.contains(z.real()))
      throw Error(ErrorCode::OnCut, "sqrt(H) is two-valued on E; use sqrtH_rim");
    z = cdouble(z.real(), 0.0);
  }
  cdouble out(1.0, 0.0);
  for (double b : e.endpoints()) {
    const cdouble d = z - b;
    if (std::abs(d) < 1e-300) throw Error(ErrorCode::OnCut, "evaluation at an endpoint");
    out *= std::sqrt(d);
  }
  return out;
}

/// Limit of sqrt(H(x + i side y)) as y decreases to 0, for x on E.
inline cdouble sqrtH_rim(const IntervalUnion& e, double x, int side) {
  const auto loc = e.locate(cdouble(x, 0.0));
  if (loc.kind != Location::Kind::InsideE)
    throw Error(ErrorCode::NotOnCut, "rim values exist only on E");
  double mag = 1.0;
  for (double b : e.endpoints()) mag *= std::sqrt(std::abs(x - b));
  const double s = (side >= 0 ? 1.0 : -1.0) * gap_sign(e.ell(), loc.index);
  return cdouble(0.0, s * mag);
}

}  // namespace walsh
