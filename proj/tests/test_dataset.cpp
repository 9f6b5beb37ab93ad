#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "ilr/dataset.hpp"
#include "ilr/io.hpp"

using namespace ilr;

namespace {

Dataset tiny() {
  return load_csv_string("x1,x2,y\n1,[2,3],0\n4.25,5..6,1\n7,8,?\n");
}

Dataset precise_sample(std::size_t n = 50, std::uint64_t seed = 7) {
  return synthesize(n, seed, Coefficients({-5, 1}), Interval(0, 10));
}

}  // namespace

TEST(Csv, PreciseCellIsDegenerate) {
  EXPECT_EQ(parse_interval("4.25"), Interval(4.25));
}

TEST(Csv, BracketInterval) {
  EXPECT_EQ(parse_interval("[80,90]"), Interval(80, 90));
  EXPECT_EQ(parse_interval(" [ 80 , 90 ] "), Interval(80, 90));
}

TEST(Csv, DotDotInterval) {
  EXPECT_EQ(parse_interval("80..90"), Interval(80, 90));
  EXPECT_EQ(parse_interval("-2.5..-1"), Interval(-2.5, -1));
}

TEST(Csv, Labels) {
  EXPECT_EQ(parse_label("?"), UncertainLabel::unknown());
  EXPECT_EQ(parse_label("[0,1]"), UncertainLabel::unknown());
  EXPECT_EQ(parse_label("1"), UncertainLabel::known(1));
  EXPECT_FALSE(parse_label("2").has_value());
  EXPECT_FALSE(parse_label("[0,0.5]").has_value());
}

TEST(Csv, LoadsMixedDataset) {
  const Dataset d = tiny();
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dimension(), 2u);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(d[0].features[1], Interval(2, 3));
  EXPECT_EQ(d[1].features[0], Interval(4.25));
  EXPECT_EQ(d[1].features[1], Interval(5, 6));
  EXPECT_TRUE(d[2].label.is_unknown());
  EXPECT_EQ(d.unknown_label_count(), 1u);
  EXPECT_EQ(d.uncertain_cell_count(), 2u);
}

TEST(Csv, LabelColumnMayBeAnywhereAndColumnsIgnored) {
  CsvSchema schema;
  schema.label_column = "dead";
  schema.ignore_columns = {"id"};
  const Dataset d = load_csv_string("id,dead,age\n1,1,[80,90]\n2,0,40\n", schema);
  EXPECT_EQ(d.feature_names(), std::vector<std::string>{"age"});
  EXPECT_EQ(d[0].features[0], Interval(80, 90));
  EXPECT_EQ(d[0].label, UncertainLabel::known(1));
}

TEST(Csv, ErrorsNameTheLineAndColumn) {
  try {
    load_csv_string("x1,y\n1,0\nabc,1\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("x1"), std::string::npos) << msg;
  }
  EXPECT_THROW(load_csv_string("x1,y\n[3,2],0\n"), DataError);
  EXPECT_THROW(load_csv_string("x1,y\n1,2\n"), DataError);
  EXPECT_THROW(load_csv_string("x1,y\n1,0,5\n"), DataError);
  EXPECT_THROW(load_csv_string("x1,label\n1,0\n"), DataError);
  EXPECT_THROW(load_csv_string(""), DataError);
}

TEST(Csv, CommentsAndCrlfAreTolerated) {
  const Dataset d = load_csv_string("# provenance\r\nx1,y\r\n1,0\r\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].features[0], Interval(1));
}

TEST(Csv, WriterUsesCanonicalIntervalSyntax) {
  EXPECT_EQ(to_csv_string(tiny()), "x1,x2,y\n1,[2,3],0\n4.25,[5,6],1\n7,8,?\n");
}

TEST(Csv, PropertyRoundTripIsBitExact) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.next_u64() % 4;
    std::vector<DataPoint> pts;
    for (int i = 0; i < 20; ++i) {
      DataPoint p;
      for (std::size_t j = 0; j < m; ++j) {
        const double lo = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-8, 8));
        p.features.push_back(rng.bernoulli(0.5) ? Interval(lo) : Interval(lo, lo + rng.uniform(0, 5)));
      }
      const auto r = rng.next_u64() % 3;
      p.label = r == 2 ? UncertainLabel::unknown() : UncertainLabel::known(static_cast<int>(r));
      pts.push_back(std::move(p));
    }
    const Dataset d(Dataset::default_names(m), std::move(pts));
    EXPECT_EQ(load_csv_string(to_csv_string(d)), d);
    EXPECT_EQ(dataset_from_json(nlohmann::json::parse(to_json(d).dump())), d);
  }
}

TEST(Synthesize, SameSeedSameBytes) {
  EXPECT_EQ(to_csv_string(precise_sample()), to_csv_string(precise_sample()));
  const Dataset d = precise_sample();
  EXPECT_EQ(d.size(), 50u);
  EXPECT_TRUE(d.precise());
  for (const auto& p : d.points()) EXPECT_TRUE(Interval(0, 10).contains(p.features[0].lo()));
}

TEST(Synthesize, SeedChangesData) {
  EXPECT_NE(precise_sample(100, 7), precise_sample(100, 8));
}

TEST(Synthesize, ZeroCoefficientsGiveFairCoin) {
  // With beta = 0 every label is a fair coin; over many seeds the mean is near 1/2.
  int ones = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const Dataset d = synthesize(1, s, Coefficients({0, 0}), Interval(0, 1));
    ASSERT_EQ(d.size(), 1u);
    ones += d[0].label.value();
  }
  EXPECT_NEAR(ones / 2000.0, 0.5, 0.04);
}

TEST(Rng, EngineMatchesStandardSequence) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformUsesTopBits) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform01();
    EXPECT_EQ(u, static_cast<double>(b.next_u64() >> 11) * 0x1.0p-53);
    EXPECT_TRUE(u >= 0.0 && u < 1.0);
  }
}

TEST(Intervalize, ZeroWidthSymmetric) {
  const Dataset d = load_csv_string("x,y\n5,1\n");
  const Dataset e = intervalize(d, CensorMode::symmetric, 0.0, 1);
  EXPECT_EQ(e[0].features[0], Interval(5, 5));
}

TEST(Intervalize, LeftBiased) {
  const Dataset d = load_csv_string("x,y\n5,1\n");
  EXPECT_EQ(intervalize(d, CensorMode::left_biased, 0.375, 0)[0].features[0], Interval(5.0, 5.75));
  EXPECT_EQ(intervalize(d, CensorMode::right_biased, 0.375, 0)[0].features[0], Interval(4.25, 5.0));
}

TEST(Intervalize, SymmetricWidthAndContainment) {
  const Dataset d = load_csv_string("x,y\n5,1\n");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Interval iv = intervalize(d, CensorMode::symmetric, 0.375, seed)[0].features[0];
    EXPECT_NEAR(iv.width(), 0.75, 1e-12);
    EXPECT_TRUE(iv.contains(5.0));
  }
}

TEST(Intervalize, SplitNeedsSplitPoint) {
  const Dataset d = precise_sample();
  EXPECT_THROW(intervalize(d, CensorMode::split_biased, 0.375, 0), std::invalid_argument);
  const Dataset e = intervalize(d, CensorMode::split_biased, 0.375, 0, 5.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = d[i].features[0].lo();
    if (x < 5.0) {
      EXPECT_EQ(e[i].features[0].hi(), x);
    } else {
      EXPECT_EQ(e[i].features[0].lo(), x);
    }
  }
}

TEST(Intervalize, PropertyModesKeepTheTrueValue) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset d = precise_sample(30, seed);
    const double eps = 0.05 + 0.1 * static_cast<double>(seed);
    const Dataset sym = intervalize(d, CensorMode::symmetric, eps, seed + 100);
    const Dataset left = intervalize(d, CensorMode::left_biased, eps, seed);
    const Dataset right = intervalize(d, CensorMode::right_biased, eps, seed);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = d[i].features[0].lo();
      EXPECT_TRUE(sym[i].features[0].contains(x));
      EXPECT_EQ(left[i].features[0].lo(), x);
      EXPECT_EQ(right[i].features[0].hi(), x);
      EXPECT_EQ(sym[i].label, d[i].label);
    }
  }
}

TEST(Intervalize, ZeroEpsilonThenMidpointIsIdentity) {
  const Dataset d = precise_sample();
  EXPECT_EQ(collapse(intervalize(d, CensorMode::symmetric, 0.0, 9), CollapseStrategy::midpoint), d);
}

TEST(CensorLabels, EmptySetLeavesDataUnchanged) {
  const Dataset d = precise_sample();
  EXPECT_EQ(censor_labels(d, {}), d);
}

TEST(CensorLabels, FiveRows) {
  const Dataset e = censor_labels(precise_sample(), {10, 11, 12, 13, 14});
  EXPECT_EQ(e.unknown_label_count(), 5u);
  for (std::size_t i = 10; i < 15; ++i) EXPECT_TRUE(e[i].label.is_unknown());
}

TEST(CensorLabels, IdempotentAndRangeChecked) {
  const Dataset d = precise_sample();
  EXPECT_EQ(censor_labels(censor_labels(d, {0}), {0}), censor_labels(d, {0}));
  EXPECT_THROW(censor_labels(d, {50}), std::out_of_range);
}

TEST(CensorLabels, NearestBoundaryRows) {
  // Boundary of (-5, 1) is x = 5.
  const Dataset d = load_csv_string("x,y\n1,0\n4.9,0\n5.2,1\n9,1\n5.05,1\n");
  EXPECT_EQ(rows_nearest_boundary(d, Coefficients({-5, 1}), 2), (std::set<std::size_t>{1, 4}));
}

TEST(Collapse, MidpointOfInterval) {
  const Dataset d = load_csv_string("x,y\n[4,6],1\n3,0\n");
  const Dataset m = collapse(d, CollapseStrategy::midpoint);
  EXPECT_EQ(m[0].features[0], Interval(5.0));
}

TEST(Collapse, DropUncertainRemovesUnknownLabels) {
  const Dataset d = load_csv_string("x,y\n1,?\n2,1\n[3,4],0\n5,0\n");
  const Dataset kept = collapse(d, CollapseStrategy::drop_uncertain);
  EXPECT_EQ(to_csv_string(kept), "x,y\n2,1\n5,0\n");
  const Dataset mid = collapse(d, CollapseStrategy::midpoint);
  EXPECT_EQ(to_csv_string(mid), "x,y\n2,1\n3.5,0\n5,0\n");
}

TEST(Collapse, PreciseDataUnchangedAndEmptyResultRejected) {
  const Dataset d = precise_sample();
  EXPECT_EQ(collapse(d, CollapseStrategy::midpoint), d);
  EXPECT_EQ(collapse(d, CollapseStrategy::drop_uncertain), d);
  EXPECT_THROW(collapse(load_csv_string("x,y\n1,?\n"), CollapseStrategy::midpoint), DataError);
}

TEST(Digest, TracksContent) {
  EXPECT_EQ(digest(precise_sample()), digest(precise_sample()));
  EXPECT_NE(digest(precise_sample(50, 7)), digest(precise_sample(50, 8)));
  EXPECT_EQ(digest_bytes(""), "cbf29ce484222325");
}
