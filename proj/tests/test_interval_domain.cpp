#include <gtest/gtest.h>

#include <random>

#include "walsh/interval_domain.hpp"

using namespace walsh;
using Kind = Location::Kind;

TEST(ParseDomain, TwoIntervals) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 1.0}});
  EXPECT_EQ(e.ell(), 2u);
  const std::vector<double> expected{-1.0, -0.3, 0.1, 1.0};
  EXPECT_TRUE(std::equal(e.endpoints().begin(), e.endpoints().end(), expected.begin()));
}

TEST(ParseDomain, SingleInterval) {
  const auto e = parse_domain({{-1.0, 1.0}});
  EXPECT_EQ(e.ell(), 1u);
}

TEST(ParseDomain, SortsUnorderedPairs) {
  const auto e = parse_domain({{0.1, 1.0}, {-1.0, -0.3}});
  EXPECT_EQ(e.b(1), -1.0);
  EXPECT_EQ(e.b(4), 1.0);
}

TEST(ParseDomain, RejectsOverlap) {
  try {
    parse_domain({{0.0, 1.0}, {0.5, 2.0}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Overlap);
  }
}

TEST(ParseDomain, RejectsTouching) {
  try {
    parse_domain({{0.0, 1.0}, {1.0, 2.0}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Overlap);
  }
}

TEST(ParseDomain, RejectsDegenerate) {
  for (auto pair : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
    try {
      parse_domain({pair});
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::Degenerate);
    }
  }
}

TEST(ParseDomain, RejectsEmpty) {
  EXPECT_THROW(parse_domain(std::span<const std::pair<double, double>>{}), Error);
}

TEST(ParseDomain, IdempotentOnOwnOutput) {
  const auto e = parse_domain({{0.5, 2.2}, {-2.0, -0.9}, {-0.7, 0.2}});
  const auto pairs = to_pairs(e);
  EXPECT_EQ(parse_domain(pairs), e);
}

TEST(Locate, Examples) {
  const auto e = parse_domain({{-1.0, -0.3}, {0.1, 1.0}});
  EXPECT_EQ(e.locate({0.5, 0.0}), (Location{Kind::InsideE, 2}));
  EXPECT_EQ(e.locate({0.0, 0.0}), (Location{Kind::InGap, 1}));
  EXPECT_EQ(e.locate({1.0, 2.0}).kind, Kind::OffAxis);
}

TEST(Locate, EndpointsAreInsideAndRaysAreOuterGaps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const auto e = parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}});
  for (std::size_t j = 1; j <= 2 * e.ell(); ++j) {
    const auto loc = e.locate({e.b(j), 0.0});
    EXPECT_EQ(loc.kind, Kind::InsideE);
    EXPECT_EQ(loc.index, (j + 1) / 2);
  }
  for (int i = 0; i < 100; ++i) {
    const double d = u(rng) + 1e-9;
    EXPECT_EQ(e.locate({e.b(1) - d, 0.0}), (Location{Kind::InGap, 0}));
    EXPECT_EQ(e.locate({e.b(6) + d, 0.0}), (Location{Kind::InGap, 3}));
  }
}

TEST(Gaps, TileTheRealLine) {
  const auto e = parse_domain({{-2.0, -0.9}, {-0.7, 0.2}, {0.5, 2.2}});
  const auto gaps = e.gaps();
  ASSERT_EQ(gaps.size(), 4u);
  EXPECT_FALSE(gaps.front().bounded());
  EXPECT_FALSE(gaps.back().bounded());
  for (std::size_t k = 1; k < e.ell(); ++k) {
    EXPECT_EQ(gaps[k].lower, e.b(2 * k));
    EXPECT_EQ(gaps[k].upper, e.b(2 * k + 1));
  }
  for (double x = -5.0; x < 5.0; x += 0.01) {
    int hits = e.contains(x) ? 1 : 0;
    for (const auto& g : gaps) hits += g.contains(x) ? 1 : 0;
    EXPECT_EQ(hits, 1) << x;
  }
}
