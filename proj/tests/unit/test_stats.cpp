#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fastloc/stats.hpp"
#include "test_util.hpp"

using namespace fastloc;
using fastloc::oracle::random_field;

namespace {

EigenSet synthetic(const GridShape& s, const std::vector<double>& lambdas, const std::vector<GridPoint>& centers) {
  EigenSet e;
  for (std::size_t j = 0; j < lambdas.size(); ++j) e.pairs.push_back({lambdas[j], ScalarField(s), centers[j], 0.0});
  return e;
}

MinimaList minima_at(const std::vector<GridPoint>& pts) {
  MinimaList m;
  double v = 0.0;
  for (auto p : pts) m.entries.push_back({p, v += 1.0});
  return m;
}

}  // namespace

TEST(LocalMinima, FindsStrictMinimaInValueOrder) {
  auto s = GridShape::lattice(8);
  ScalarField f(s, 10.0);
  f(2, 2) = 1.0;
  f(5, 6) = 0.5;
  f(0, 0) = 3.0;
  auto m = find_local_minima(f, 16, "test");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.entries[0].location, (GridPoint{5, 6}));
  EXPECT_EQ(m.entries[1].location, (GridPoint{2, 2}));
  EXPECT_EQ(m.entries[2].location, (GridPoint{0, 0}));
  EXPECT_EQ(m.source, "test");
  EXPECT_EQ(find_local_minima(f, 2).size(), 2u);
  EXPECT_THROW(find_local_minima(f, 0), Error);
}

TEST(LocalMinima, NeighbourhoodWrapsAroundTheTorus) {
  auto s = GridShape::lattice(8);
  ScalarField f(s, 5.0);
  f(0, 0) = 1.0;
  f(7, 7) = 2.0;  // diagonal neighbour of (0,0) across both seams
  auto m = find_local_minima(f, 16);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.entries[0].location, (GridPoint{0, 0}));
}

TEST(LocalMinima, PlateausAreNotStrictMinima) {
  auto s = GridShape::lattice(8);
  ScalarField f(s, 5.0);
  f(3, 3) = 1.0;
  f(3, 4) = 1.0;
  EXPECT_EQ(find_local_minima(f, 16).size(), 0u);
  EXPECT_EQ(find_local_minima(ScalarField(s, 2.0), 16).size(), 0u);
}

TEST(LocalMinima, EqualValuesOrderedByIndex) {
  auto s = GridShape::lattice(8);
  ScalarField f(s, 5.0);
  f(6, 1) = 1.0;
  f(1, 6) = 1.0;
  auto m = find_local_minima(f, 16);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.entries[0].location, (GridPoint{1, 6}));
}

TEST(LocalMinima, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = GridShape::lattice(16);
    auto f = random_field(s, rng, 0.1, 2.0);
    auto g = f;
    for (auto& v : g.values()) v = std::exp(3.0 * v) + 7.0;
    auto a = find_local_minima(f, 10), b = find_local_minima(g, 10);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a.entries[i].location, b.entries[i].location);
      if (i) ASSERT_LE(a.entries[i - 1].value, a.entries[i].value);
    }
  }
}

TEST(LocalMinima, AffineTransformKeepsMatchingStatistics) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> adist(0.01, 100.0), bdist(-50.0, 50.0);
  std::uniform_int_distribution<int> coord(0, 15);
  auto s = GridShape::lattice(16);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_field(s, rng, 0.0, 1.0);
    const double a = adist(rng), b = bdist(rng);
    auto g = f;
    for (auto& v : g.values()) v = a * v + b;
    std::vector<double> lambdas;
    std::vector<GridPoint> centers;
    for (int j = 0; j < 12; ++j) {
      lambdas.push_back(1.0 + j);
      centers.push_back({coord(rng), coord(rng)});
    }
    auto e = synthetic(s, lambdas, centers);
    auto ma = find_local_minima(f, 8), mb = find_local_minima(g, 8);
    ASSERT_EQ(ma.size(), mb.size());
    for (std::size_t i = 0; i < ma.size(); ++i) ASSERT_EQ(ma.entries[i].location, mb.entries[i].location);
    auto ra = evaluate(match(ma, e), e), rb = evaluate(match(mb, e), e);
    ASSERT_EQ(ra.eig_rat, rb.eig_rat);
    ASSERT_EQ(ra.first_miss_eig, rb.first_miss_eig);
    ASSERT_EQ(ra.first_miss_min, rb.first_miss_min);
    ASSERT_EQ(ra.dismissed_min, rb.dismissed_min);
  }
}

TEST(Match, GreedyNearestWithinRadius) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {1, 2, 3, 4}, {{0, 0}, {10, 10}, {20, 20}, {10, 12}});
  auto mt = match(minima_at({{10, 11}, {19, 19}, {0, 30}, {25, 5}}), e);
  ASSERT_EQ(mt.assignments.size(), 4u);
  // equidistant to eigen 1 and 3; the lower index wins
  EXPECT_EQ(mt.assignments[0], 1);
  EXPECT_EQ(mt.assignments[1], 2);
  EXPECT_EQ(mt.assignments[2], 0);
  EXPECT_FALSE(mt.assignments[3].has_value());
  EXPECT_EQ(mt.matched(), 3u);
}

TEST(Match, OneToOneUnlessManyToOne) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {1, 2}, {{5, 5}, {25, 25}});
  auto mins = minima_at({{5, 5}, {5, 6}});
  auto one = match(mins, e);
  EXPECT_EQ(one.assignments[0], 0);
  EXPECT_FALSE(one.assignments[1].has_value());
  auto many = match(mins, e, {5.0, 64, true});
  EXPECT_EQ(many.assignments[1], 0);
}

TEST(Match, RadiusIsInclusive) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {1}, {{0, 0}});
  EXPECT_EQ(match(minima_at({{3, 4}}), e).assignments[0], 0);
  EXPECT_FALSE(match(minima_at({{3, 5}}), e).assignments[0].has_value());
}

TEST(Match, PoolLimitsCandidates) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {1, 2, 3}, {{0, 0}, {8, 8}, {16, 16}});
  EXPECT_FALSE(match(minima_at({{16, 16}}), e, {5.0, 2}).assignments[0].has_value());
  EXPECT_EQ(match(minima_at({{16, 16}}), e, {5.0, 3}).assignments[0], 2);
}

TEST(Match, RejectsUnsortedEigenvalues) {
  auto s = GridShape::lattice(8);
  EXPECT_THROW(match(minima_at({{0, 0}}), synthetic(s, {2, 1}, {{0, 0}, {1, 1}})), Error);
}

TEST(Statistics, WorkedExample) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {5, 6, 7, 8}, {{0, 0}, {10, 10}, {20, 20}, {28, 4}});
  auto mt = match(minima_at({{0, 1}, {16, 0}, {21, 21}}), e);
  ASSERT_EQ(mt.assignments[0], 0);
  ASSERT_FALSE(mt.assignments[1].has_value());
  ASSERT_EQ(mt.assignments[2], 2);
  auto r = evaluate(mt, e);
  ASSERT_TRUE(r.eig_rat.has_value());
  EXPECT_NEAR(*r.eig_rat, 12.0 / 11.0, 1e-15);
  EXPECT_NEAR(*r.eig_rat, 1.0909090909090908, 1e-15);
  EXPECT_EQ(r.first_miss_eig, 2);
  EXPECT_EQ(r.first_miss_min, 2);
  EXPECT_EQ(r.dismissed_min, 1);
  EXPECT_EQ(r.n_matched, 2);
}

TEST(Statistics, PerfectAndEmptyMatchings) {
  auto s = GridShape::lattice(32);
  auto e = synthetic(s, {1, 2, 3}, {{0, 0}, {10, 10}, {20, 20}});
  auto perfect = evaluate(match(minima_at({{0, 0}, {10, 10}, {20, 20}}), e), e);
  EXPECT_EQ(*perfect.eig_rat, 1.0);
  EXPECT_EQ(perfect.first_miss_eig, 4);
  EXPECT_EQ(perfect.first_miss_min, 4);
  EXPECT_EQ(perfect.dismissed_min, 0);
  auto none = evaluate(match(minima_at({{5, 25}, {25, 5}}), e), e);
  EXPECT_FALSE(none.eig_rat.has_value());
  EXPECT_EQ(none.first_miss_eig, 1);
  EXPECT_EQ(none.first_miss_min, 1);
  EXPECT_EQ(none.dismissed_min, 2);
}

TEST(Statistics, InvariantsOnRandomConfigurations) {
  std::mt19937_64 rng(72);
  std::uniform_int_distribution<int> coord(0, 31), count(1, 16);
  std::uniform_real_distribution<double> gap(0.0, 1.0);
  auto s = GridShape::lattice(32);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = count(rng), k = count(rng);
    std::vector<double> lambdas;
    std::vector<GridPoint> centers, pts;
    double lam = 0.1;
    for (int j = 0; j < m; ++j) {
      lambdas.push_back(lam += gap(rng));
      centers.push_back({coord(rng), coord(rng)});
    }
    for (int i = 0; i < k; ++i) pts.push_back({coord(rng), coord(rng)});
    auto e = synthetic(s, lambdas, centers);
    auto mt = match(minima_at(pts), e);
    auto r = evaluate(mt, e);
    ASSERT_EQ(r.dismissed_min + r.n_matched, k);
    ASSERT_GE(r.first_miss_eig, 1);
    ASSERT_LE(r.first_miss_eig, m + 1);
    ASSERT_GE(r.first_miss_min, 1);
    ASSERT_LE(r.first_miss_min, k + 1);
    if (r.eig_rat) ASSERT_GE(*r.eig_rat, 1.0 - 1e-15);
    std::set<int> used;
    for (std::size_t i = 0; i < mt.assignments.size(); ++i) {
      if (!mt.assignments[i]) continue;
      const int j = *mt.assignments[i];
      ASSERT_TRUE(used.insert(j).second);
      ASSERT_LE(torus_distance_in_h(s, pts[i], centers[j]), mt.radius_in_h + 1e-12);
    }
  }
}

TEST(Summarize, AveragesAndCountsMissingRatios) {
  std::vector<StatsRecord> recs{{1.2, 2, 3, 1, 4}, {std::nullopt, 1, 1, 5, 0}, {1.0, 4, 6, 0, 5}};
  auto s = summarize(recs);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.eig_rat_missing, 1u);
  EXPECT_NEAR(s.eig_rat, 1.1, 1e-15);
  EXPECT_NEAR(s.first_miss_eig, 7.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.first_miss_min, 10.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.dismissed_min, 2.0, 1e-15);
  EXPECT_THROW(summarize({}), Error);
}
