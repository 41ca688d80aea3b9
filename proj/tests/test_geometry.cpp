#include <gtest/gtest.h>

#include <random>

#include "arbor/geometry.hpp"

using namespace arbor;

namespace {

PointSet originals(std::vector<int> keys) { return PointSet::from_permutation(Permutation(std::move(keys))); }

// Literal definition: a third point anywhere in the closed rectangle.
bool satisfied_by_definition(const std::vector<Point>& pts, const Point& a, const Point& b) {
    if (a.key == b.key || a.time == b.time) return true;
    const int klo = std::min(a.key, b.key), khi = std::max(a.key, b.key);
    const int tlo = std::min(a.time, b.time), thi = std::max(a.time, b.time);
    for (const auto& r : pts) {
        if (r == a || r == b) continue;
        if (r.key >= klo && r.key <= khi && r.time >= tlo && r.time <= thi) return true;
    }
    return false;
}

}  // namespace

TEST(Relate, Examples) {
    EXPECT_EQ(relate({1, 1}, {1, 5}), Relation::Below);
    EXPECT_EQ(relate({1, 2}, {3, 1}), Relation::NE);
    EXPECT_EQ(relate({2, 2}, {2, 2}), Relation::Same);
}

TEST(Relate, AllEightDirections) {
    const Point c{5, 5};
    EXPECT_EQ(relate(c, {5, 3}), Relation::Above);
    EXPECT_EQ(relate(c, {3, 5}), Relation::Left);
    EXPECT_EQ(relate(c, {7, 5}), Relation::Right);
    EXPECT_EQ(relate(c, {3, 3}), Relation::NW);
    EXPECT_EQ(relate(c, {7, 7}), Relation::SE);
    EXPECT_EQ(relate(c, {3, 7}), Relation::SW);
}

TEST(Permutation, RejectsBadInput) {
    EXPECT_THROW(Permutation({1, 1}), InputError);
    EXPECT_THROW(Permutation({0, 1}), InputError);
    EXPECT_THROW(Permutation({1, 3}), InputError);
    EXPECT_THROW(Permutation::parse(std::string("1 x 2")), InputError);
    EXPECT_THROW(Permutation::parse(std::string("")), InputError);
}

TEST(Permutation, ParseAndLookup) {
    const auto p = Permutation::parse(std::string("3 1 2 5 4\n"));
    EXPECT_EQ(p.size(), 5);
    EXPECT_EQ(p.key_at(1), 3);
    EXPECT_EQ(p.time_of(4), 5);
    EXPECT_EQ(p.to_string(), "3 1 2 5 4");
    EXPECT_EQ(p.original_of(2), (Point{2, 3}));
}

TEST(RectSatisfied, Examples) {
    const PointSet a(3, {{1, 1}, {3, 3}, {2, 2}});
    EXPECT_TRUE(rect_satisfied(a, {1, 1}, {3, 3}));

    const PointSet x = originals({3, 1, 2, 5, 4});
    EXPECT_FALSE(rect_satisfied(x, {3, 1}, {1, 2}));

    const PointSet col(5, {{4, 5}, {4, 2, Kind::Marked}, {1, 1}});
    EXPECT_TRUE(rect_satisfied(col, {4, 5}, {4, 2}));
}

TEST(RectSatisfied, UnknownPointIsQueryError) {
    const PointSet x = originals({1, 2});
    EXPECT_THROW(rect_satisfied(x, {1, 1}, {2, 1}), QueryError);
}

TEST(Satisfaction, Examples) {
    const auto r = is_arborally_satisfied(originals({1, 2, 3}));
    EXPECT_FALSE(r.satisfied);
    ASSERT_TRUE(r.witness);
    EXPECT_EQ(r.witness->first, (Point{1, 1}));
    EXPECT_EQ(r.witness->second, (Point{2, 2}));
    EXPECT_TRUE(is_arborally_satisfied(originals({1})).satisfied);
    const auto pw = is_arborally_satisfied_pairwise(originals({1, 2, 3}));
    EXPECT_FALSE(pw.satisfied);
    EXPECT_EQ(pw.witness->first, (Point{1, 1}));
}

// The sweep, both pairwise variants and the literal definition agree on
// random point sets with a permutation backbone.
TEST(Satisfaction, SweepMatchesDefinitionOnRandomSets) {
    std::mt19937 rng(12345);
    for (int iter = 0; iter < 3000; ++iter) {
        const int n = 1 + static_cast<int>(rng() % 7);
        std::vector<int> keys(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) keys[static_cast<std::size_t>(i)] = i + 1;
        std::shuffle(keys.begin(), keys.end(), rng);
        std::vector<Point> pts;
        for (int t = 1; t <= n; ++t) pts.push_back({keys[static_cast<std::size_t>(t - 1)], t});
        for (int t = 1; t <= n; ++t)
            for (int k = 1; k <= n; ++k)
                if (k != keys[static_cast<std::size_t>(t - 1)] && rng() % 3 == 0) pts.push_back({k, t, Kind::Marked});
        const PointSet set(n, pts);
        bool expect = true;
        for (std::size_t i = 0; i < pts.size() && expect; ++i)
            for (std::size_t j = i + 1; j < pts.size() && expect; ++j) expect = satisfied_by_definition(pts, pts[i], pts[j]);
        ASSERT_EQ(is_arborally_satisfied(set).satisfied, expect) << "iteration " << iter;
        ASSERT_EQ(is_arborally_satisfied_pairwise(set).satisfied, expect);
        ASSERT_EQ(is_arborally_satisfied_pairwise(set, WitnessSearch::Scan).satisfied, expect);
        const auto r = is_arborally_satisfied(set);
        if (!r.satisfied) {
            EXPECT_FALSE(satisfied_by_definition(pts, r.witness->first, r.witness->second));
        }
    }
}

TEST(PointSet, RejectsDuplicatesAndTwoOriginalsPerRow) {
    EXPECT_THROW(PointSet(2, {{1, 1}, {1, 1}}), InputError);
    EXPECT_THROW(PointSet(2, {{1, 1}, {2, 1}}), InputError);
}

TEST(PointSet, CountsAndFind) {
    const PointSet s(3, {{1, 1}, {2, 2}, {3, 3}, {3, 1, Kind::Marked}});
    EXPECT_EQ(s.count_in(1, 3, 1, 1), 2u);
    EXPECT_EQ(s.count_in(2, 3, 1, 3), 3u);
    EXPECT_EQ(s.find(3, 1)->kind, Kind::Marked);
    EXPECT_EQ(s.find(3, 3)->kind, Kind::Original);
    EXPECT_FALSE(s.find(2, 1));
}

TEST(RectangleIndex, MatchesBruteForceCounts) {
    std::mt19937 rng(7);
    const int n = 20;
    std::vector<Point> pts;
    for (int t = 1; t <= n; ++t)
        for (int k = 1; k <= n; ++k)
            if (rng() % 4 == 0) pts.push_back({k, t});
    const RectangleIndex idx(n, pts);
    for (int q = 0; q < 2000; ++q) {
        int a = 1 + static_cast<int>(rng() % n), b = 1 + static_cast<int>(rng() % n);
        int c = 1 + static_cast<int>(rng() % n), d = 1 + static_cast<int>(rng() % n);
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        std::size_t want = 0;
        for (const auto& p : pts) want += p.key >= a && p.key <= b && p.time >= c && p.time <= d;
        ASSERT_EQ(idx.count(a, b, c, d), want);
    }
    EXPECT_TRUE(idx.empty(1, n, 5, 4));
}
