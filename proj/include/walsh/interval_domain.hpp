#pragma once

// The compact set E: a finite union of disjoint closed real intervals,
// stored as its sorted endpoints b_1 < b_2 < ... < b_{2l}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walsh/error.hpp"

namespace walsh {

using cdouble = std::complex<double>;

/// One of the l+1 open intervals of R \ E. Gap 0 and gap l are unbounded.
struct Gap {
  std::size_t index = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return lower < x && x < upper; }
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
};

/// Where a point sits relative to E.
struct Location {
  enum class Kind { InsideE, InGap, OffAxis };
  Kind kind = Kind::OffAxis;
  std::size_t index = 0;  // 1-based component for InsideE, gap index for InGap

  friend bool operator==(const Location&, const Location&) = default;
};

class IntervalUnion {
 public:
  /// Takes endpoints already in canonical order; throws if they are not.
  explicit IntervalUnion(std::vector<double> endpoints) : b_(std::move(endpoints)) {
    if (b_.empty()) throw Error(ErrorCode::EmptyInput, "no intervals given");
    if (b_.size() % 2 != 0)
      throw Error(ErrorCode::InvalidArgument, "odd number of endpoints");
    for (double v : b_)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite endpoint");
    for (std::size_t i = 0; i + 1 < b_.size(); i += 2)
      if (!(b_[i] < b_[i + 1]))
        throw Error(ErrorCode::Degenerate, "interval " + std::to_string(i / 2 + 1) +
                                               " has non-positive length");
    for (std::size_t i = 1; i + 1 < b_.size(); i += 2)
      if (!(b_[i] < b_[i + 1]))
        throw Error(ErrorCode::Overlap, "intervals " + std::to_string(i / 2 + 1) + " and " +
                                            std::to_string(i / 2 + 2) + " touch or overlap");
  }

  std::size_t ell() const { return b_.size() / 2; }
  std::span<const double> endpoints() const { return b_; }

  /// 1-based endpoint access, b(1) .. b(2l).
  double b(std::size_t j) const { return b_[j - 1]; }

  /// Component j = [b_{2j-1}, b_{2j}], 1-based.
  std::pair<double, double> component(std::size_t j) const { return {b(2 * j - 1), b(2 * j)}; }

  Gap gap(std::size_t k) const {
    Gap g;
    g.index = k;
    if (k > 0) g.lower = b(2 * k);
    if (k < ell()) g.upper = b(2 * k + 1);
    return g;
  }

  std::vector<Gap> gaps() const {
    std::vector<Gap> out;
    for (std::size_t k = 0; k <= ell(); ++k) out.push_back(gap(k));
    return out;
  }

  double sum_endpoints() const {
    double s = 0.0;
    for (double v : b_) s += v;
    return s;
  }

  double diameter() const { return b_.back() - b_.front(); }

  /// Exact classification; no tolerance is applied at the endpoints.
  Location locate(cdouble z) const {
    if (z.imag() != 0.0) return {Location::Kind::OffAxis, 0};
    const double x = z.real();
    // number of endpoints <= x
    const auto count =
        static_cast<std::size_t>(std::upper_bound(b_.begin(), b_.end(), x) - b_.begin());
    if (count % 2 == 1) return {Location::Kind::InsideE, (count + 1) / 2};
    // x equal to a right endpoint b_{2j} lands here with an even count
    if (count > 0 && b_[count - 1] == x) return {Location::Kind::InsideE, count / 2};
    return {Location::Kind::InGap, count / 2};
  }

  bool contains(double x) const { return locate(cdouble(x, 0.0)).kind == Location::Kind::InsideE; }

  /// Image under x -> scale*x + shift (scale > 0).
  IntervalUnion affine(double scale, double shift) const {
    std::vector<double> out(b_.size());
    std::transform(b_.begin(), b_.end(), out.begin(),
                   [&](double v) { return scale * v + shift; });
    return IntervalUnion(std::move(out));
  }

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<double> b_;
};

/// Builds an IntervalUnion from (lo, hi) pairs given in any order.
inline IntervalUnion parse_domain(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no intervals given");
  std::vector<std::pair<double, double>> sorted(pairs.begin(), pairs.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto [lo, hi] = sorted[i];
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw Error(ErrorCode::InvalidArgument, "non-finite endpoint");
    if (!(lo < hi))
      throw Error(ErrorCode::Degenerate,
                  "pair " + std::to_string(i + 1) + " has lower endpoint >= upper endpoint");
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> b;
  b.reserve(2 * sorted.size());
  for (const auto& [lo, hi] : sorted) {
    if (!b.empty() && !(b.back() < lo))
      throw Error(ErrorCode::Overlap, "intervals touch or overlap near " + std::to_string(lo));
    b.push_back(lo);
    b.push_back(hi);
  }
  return IntervalUnion(std::move(b));
}

inline IntervalUnion parse_domain(std::initializer_list<std::pair<double, double>> pairs) {
  return parse_domain(std::span<const std::pair<double, double>>(pairs.begin(), pairs.size()));
}

/// Pairs view of a domain, the inverse of parse_domain.
inline std::vector<std::pair<double, double>> to_pairs(const IntervalUnion& e) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t j = 1; j <= e.ell(); ++j) out.push_back(e.component(j));
  return out;
}

}  // namespace walsh
