#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ilr/interval.hpp"
#include "ilr/rng.hpp"

using namespace ilr;

TEST(Interval, MakeKeepsBoundsExactly) {
  const Interval iv = interval_make(1.2, 1.5);
  EXPECT_EQ(iv.lo(), 1.2);
  EXPECT_EQ(iv.hi(), 1.5);
  EXPECT_FALSE(iv.degenerate());
}

TEST(Interval, PreciseValueIsDegenerate) {
  const Interval iv = interval_make(3.0, 3.0);
  EXPECT_TRUE(iv.degenerate());
  EXPECT_EQ(iv, Interval(3.0));
  EXPECT_TRUE(iv.contains(3.0));
}

TEST(Interval, SwappedBoundsAreRejected) {
  EXPECT_THROW(interval_make(2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(interval_make(NAN, 1.0), std::invalid_argument);
  EXPECT_THROW(interval_make(0.0, INFINITY), std::invalid_argument);
}

TEST(Interval, Containment) {
  const Interval iv(1.0, 2.0);
  EXPECT_TRUE(iv.contains(1.0));
  EXPECT_TRUE(iv.contains(2.0));
  EXPECT_FALSE(iv.contains(2.0000001));
  EXPECT_TRUE(iv.contains(Interval(1.5, 2.0)));
  EXPECT_FALSE(iv.contains(Interval(0.5, 2.0)));
}

TEST(UncertainLabel, UnknownIsTheVacuousInterval) {
  EXPECT_EQ(UncertainLabel::unknown().as_interval(), Interval(0.0, 1.0));
  EXPECT_EQ(UncertainLabel::known(1).as_interval(), Interval(1.0));
  EXPECT_THROW(UncertainLabel::known(2), std::invalid_argument);
  EXPECT_THROW(UncertainLabel::unknown().value(), std::logic_error);
}

TEST(LinearScoreBounds, IdentityCoefficient) {
  const std::vector<Interval> x{Interval(2, 3)};
  EXPECT_EQ(linear_score_bounds(Coefficients({0, 1}), x), Interval(2, 3));
}

TEST(LinearScoreBounds, NegativeCoefficientSelectsOppositeEndpoints) {
  const std::vector<Interval> x{Interval(0, 1)};
  EXPECT_EQ(linear_score_bounds(Coefficients({1, -2}), x), Interval(-1, 1));
}

TEST(LinearScoreBounds, SumOfUnitIntervals) {
  const std::vector<Interval> x{Interval(0, 1), Interval(0, 1)};
  EXPECT_EQ(linear_score_bounds(Coefficients({0, 1, 1}), x), Interval(0, 2));
}

TEST(LinearScoreBounds, DimensionMismatch) {
  const std::vector<Interval> x{Interval(0, 1)};
  EXPECT_THROW(linear_score_bounds(Coefficients({0, 1, 1}), x), DataError);
}

namespace {

struct RandomBox {
  Coefficients c;
  std::vector<Interval> box;
};

RandomBox random_box(Rng& rng) {
  const std::size_t m = 1 + rng.next_u64() % 5;
  std::vector<double> beta(m + 1);
  for (auto& b : beta) b = rng.uniform(-4, 4);
  std::vector<Interval> box;
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = rng.uniform(-10, 10);
    box.emplace_back(lo, lo + rng.uniform(0, 3));
  }
  return {Coefficients(beta), box};
}

}  // namespace

TEST(LinearScoreBounds, PropertySampledPointsLieInside) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [c, box] = random_box(rng);
    const Interval s = linear_score_bounds(c, box);
    std::vector<double> p(box.size());
    for (int k = 0; k < 50; ++k) {
      for (std::size_t j = 0; j < box.size(); ++j) p[j] = rng.uniform(box[j].lo(), box[j].hi());
      const double v = linear_score(c, p);
      EXPECT_LE(s.lo(), v + 1e-12);
      EXPECT_GE(s.hi(), v - 1e-12);
    }
  }
}

TEST(LinearScoreBounds, PropertyDegenerateEqualsDotProduct) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [c, box] = random_box(rng);
    std::vector<double> p;
    std::vector<Interval> points;
    for (const auto& iv : box) {
      p.push_back(iv.lo());
      points.emplace_back(iv.lo());
    }
    const Interval s = linear_score_bounds(c, points);
    EXPECT_TRUE(s.degenerate());
    EXPECT_EQ(s.lo(), linear_score(c, p));
  }
}

TEST(LinearScoreBounds, PropertyWideningNeverShrinks) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto [c, box] = random_box(rng);
    const Interval narrow = linear_score_bounds(c, box);
    const std::size_t j = rng.next_u64() % box.size();
    box[j] = Interval(box[j].lo() - rng.uniform(0, 1), box[j].hi() + rng.uniform(0, 1));
    EXPECT_TRUE(linear_score_bounds(c, box).contains(narrow));
  }
}
