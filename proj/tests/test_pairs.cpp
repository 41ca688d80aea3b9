#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "arbor/pairs.hpp"

using namespace arbor;

namespace {

// Classification straight from the relation patterns.
struct Oracle {
    bool zig = false, zag = false;
};

Oracle classify_by_relations(const AugmentedPointSet& aug, const Point& m) {
    const Point p = aug.permutation().original_at(m.time);
    // first point above m, by scanning the column
    Point above{};
    for (int t = m.time - 1; t >= 1; --t) {
        if (aug.points().contains(m.key, t)) {
            above = {m.key, t};
            break;
        }
    }
    const Point q = aug.permutation().original_at(above.time);
    const bool right = m.key > p.key;
    const Relation pq = relate(p, q), mq = relate(m, q);
    Oracle o;
    o.zig = right ? pq == Relation::NW : pq == Relation::NE;
    o.zag = right ? (mq == Relation::Above || mq == Relation::NE) : (mq == Relation::Above || mq == Relation::NW);
    return o;
}

}  // namespace

TEST(Cp, Examples) {
    const auto aug = greedy_sweep(Permutation({3, 1, 2, 5, 4}));
    const auto a = cp(aug, {3, 3});
    EXPECT_EQ(a.p, (Point{2, 3}));
    EXPECT_EQ(a.q, (Point{1, 2}));
    EXPECT_EQ(a.side, Side::R);
    EXPECT_EQ(a.cls, PairClass::Zig);
    EXPECT_EQ(a.goodness, Goodness::NotApplicable);

    const auto b = cp(aug, {3, 2});
    EXPECT_EQ(b.p, (Point{1, 2}));
    EXPECT_EQ(b.q, (Point{3, 1}));
    EXPECT_EQ(b.side, Side::R);
    EXPECT_EQ(b.cls, PairClass::Zag);
    EXPECT_EQ(b.goodness, Goodness::Good);
    EXPECT_EQ(b.orientation, Orientation::Slash);

    const auto c = cp(greedy_sweep(Permutation({1, 2})), {1, 2});
    EXPECT_EQ(c.p, (Point{2, 2}));
    EXPECT_EQ(c.q, (Point{1, 1}));
    EXPECT_EQ(c.side, Side::L);
    EXPECT_EQ(c.cls, PairClass::Zag);
    EXPECT_EQ(c.goodness, Goodness::Good);
    EXPECT_EQ(c.orientation, Orientation::Backslash);

    EXPECT_THROW(cp(aug, {3, 1}), QueryError);
    EXPECT_THROW(cp(aug, {4, 2}), QueryError);
}

TEST(ClassifyAll, Fixture) {
    const auto aug = greedy_sweep(Permutation({3, 1, 2, 5, 4}));
    const auto cls = classify_all(aug);
    const auto& t = cls.tally;
    EXPECT_EQ(t.g_total, 6u);
    EXPECT_EQ(t.mmc, 2u);
    EXPECT_EQ(t.mfc, 4u);
    EXPECT_EQ(t.gr, 4u);
    EXPECT_EQ(t.br, 0u);
    EXPECT_EQ(t.observable, 0u);
    EXPECT_TRUE(cls.checks.ok()) << cls.checks.summary();
    // (3,3) zig and (1,3) zag share ((2,3),(1,2)); (3,5) zig and (5,5) zag
    // share ((4,5),(5,4)). Four distinct pairs, two of them in both classes.
    EXPECT_EQ(t.cp_distinct, 4u);
    EXPECT_EQ(t.zig_zag_overlap, 2u);
    EXPECT_LE(t.g_total, 2 * t.cp_distinct);
}

TEST(ClassifyAll, IdentityAndSingleton) {
    for (int n : {1, 2, 5, 40}) {
        const auto cls = classify_all(greedy_sweep(Permutation::identity(n)));
        EXPECT_EQ(cls.tally.mmc, 0u);
        EXPECT_EQ(cls.tally.mfc, static_cast<std::size_t>(n - 1));
        EXPECT_EQ(cls.tally.gr, static_cast<std::size_t>(n - 1));
        EXPECT_EQ(cls.tally.br, 0u);
    }
    const auto one = classify_all(greedy_sweep(Permutation({1})));
    EXPECT_EQ(one.tally.g_total, 0u);
    EXPECT_TRUE(one.records.empty());
}

TEST(ClassifyAll, MismatchedTreeRejected) {
    const Permutation p({3, 1, 2, 5, 4});
    const auto other = infer_decomposition(Permutation({2, 4, 1, 3, 5}));
    EXPECT_THROW(classify_all(greedy_sweep(p), other.tree), InputError);
}

TEST(ClassifyAll, MatchesRelationOracleExhaustively) {
    for (int n = 1; n <= 7; ++n) {
        std::vector<int> keys(static_cast<std::size_t>(n));
        std::iota(keys.begin(), keys.end(), 1);
        do {
            const auto aug = greedy_sweep(Permutation(keys));
            const auto cls = classify_all(aug);
            ASSERT_TRUE(cls.checks.ok()) << Permutation(keys).to_string() << " " << cls.checks.summary();
            for (std::size_t i = 0; i < cls.records.size(); ++i) {
                const auto o = classify_by_relations(aug, aug.marked()[i]);
                ASSERT_NE(o.zig, o.zag) << "neither or both at " << to_string(aug.marked()[i]);
                ASSERT_EQ(cls.records[i].cls == PairClass::Zig, o.zig);
                if (cls.records[i].cls == PairClass::Zag) {
                    const auto& r = cls.records[i];
                    const int klo = std::min(r.p.key, r.q.key), khi = std::max(r.p.key, r.q.key);
                    bool empty = true;
                    for (int t = r.q.time + 1; t < r.p.time; ++t) {
                        const int k = aug.permutation().key_at(t);
                        empty = empty && !(k > klo && k < khi);
                    }
                    ASSERT_EQ(r.goodness == Goodness::Good, empty);
                }
            }
            ASSERT_LE(cls.tally.g_total, 2 * cls.tally.cp_distinct);
        } while (std::next_permutation(keys.begin(), keys.end()));
    }
}

TEST(ClassifyAll, CouplingInjectivePerSide) {
    std::mt19937 rng(3);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<int> keys(1 + rng() % 150);
        std::iota(keys.begin(), keys.end(), 1);
        std::shuffle(keys.begin(), keys.end(), rng);
        const auto cls = classify_all(greedy_sweep(Permutation(keys)));
        std::set<std::pair<int, int>> seen[2];
        for (const auto& r : cls.records) {
            const auto key = std::pair(r.p.time, r.q.time);
            ASSERT_TRUE(seen[r.side == Side::R].insert(key).second);
        }
        ASSERT_TRUE(cls.checks.ok()) << cls.checks.summary();
    }
}

// Smallest permutation with a bad pair, found by scanning every permutation
// up to n = 8: nothing below n = 6 has one.
TEST(AmcMap, PinnedBadPairInstance) {
    const auto aug = greedy_sweep(Permutation({3, 4, 1, 6, 5, 2}));
    const auto cls = classify_all(aug);
    EXPECT_EQ(cls.tally.br, 1u);
    EXPECT_EQ(cls.tally.observable, 0u);
    EXPECT_EQ(cls.tally.mapped, 1u);
    const auto r = cp(aug, {3, 6});
    EXPECT_EQ(r.cls, PairClass::Zag);
    EXPECT_EQ(r.goodness, Goodness::Bad);
    const auto m = amc_map(aug, {3, 6});
    EXPECT_EQ(m.kind, AmcKind::Mapped);
    EXPECT_EQ(m.target, (Point{4, 5}));
    EXPECT_EQ(cp(aug, m.target).cls, PairClass::Zig);
    EXPECT_LE(cls.tally.max_preimages, 2u);
    // Good pairs are outside the map's domain.
    EXPECT_THROW(amc_map(greedy_sweep(Permutation({3, 1, 2, 5, 4})), {3, 2}), QueryError);
}

TEST(AmcMap, NoBadPairsBelowSix) {
    for (int n = 1; n <= 5; ++n) {
        std::vector<int> keys(static_cast<std::size_t>(n));
        std::iota(keys.begin(), keys.end(), 1);
        do {
            ASSERT_EQ(classify_all(greedy_sweep(Permutation(keys))).tally.br, 0u);
        } while (std::next_permutation(keys.begin(), keys.end()));
    }
}

TEST(AmcMap, PreimagesAndAggregate) {
    std::mt19937 rng(8);
    std::size_t bad_seen = 0;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<int> keys(2 + rng() % 12);
        std::iota(keys.begin(), keys.end(), 1);
        std::shuffle(keys.begin(), keys.end(), rng);
        const auto cls = classify_all(greedy_sweep(Permutation(keys)));
        const auto& t = cls.tally;
        bad_seen += t.br;
        ASSERT_LE(t.max_preimages, 2u);
        ASSERT_EQ(t.br, t.mapped + t.observable);
        ASSERT_LE(t.br, 4 * t.mmc + t.observable);
        ASSERT_EQ(t.s1_prime_original, 0u);
    }
    EXPECT_GT(bad_seen, 0u);
}

TEST(SiblingDistinctness, Examples) {
    for (auto keys : {std::vector<int>{3, 1, 2, 5, 4}, std::vector<int>{1, 2, 3, 4}, std::vector<int>{1}}) {
        const Permutation p(keys);
        const auto aug = greedy_sweep(p);
        const auto tree = infer_decomposition(p).tree;
        const auto out = check_sibling_distinctness(aug, tree, classify_all(aug, tree));
        EXPECT_TRUE(out.ok()) << out.summary();
    }
}

TEST(SiblingDistinctness, GeneratedInstances) {
    for (int k : {2, 4, 8}) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto g = generate_k_decomposable(300, k, s);
            const auto aug = greedy_sweep(g.perm);
            const auto cls = classify_all(aug, g.tree);
            const auto out = check_sibling_distinctness(aug, g.tree, cls);
            ASSERT_TRUE(out.ok()) << out.summary();
            ASSERT_LE(cls.tally.max_mmc_per_point(), k - 1);
            ASSERT_LE(cls.tally.max_observable_per_side(), k - 1);
        }
    }
}

TEST(PairsCsv, HeaderAndRows) {
    const auto cls = classify_all(greedy_sweep(Permutation({3, 1, 2, 5, 4})));
    std::ostringstream os;
    write_pairs_csv(os, cls.records);
    const std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 7);
}
