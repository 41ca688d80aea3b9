#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "arbor/decomposition.hpp"

using namespace arbor;

namespace {

bool is_block(const Permutation& p, int lo, int hi) {
    int a = p.size() + 1, b = 0;
    for (int t = lo; t <= hi; ++t) {
        a = std::min(a, p.key_at(t));
        b = std::max(b, p.key_at(t));
    }
    return b - a == hi - lo;
}

// Smallest possible maximum fanout over all trees of blocks: try every split
// of [lo, hi] into consecutive blocks.
int min_fanout(const Permutation& p, int lo, int hi, std::map<std::pair<int, int>, int>& memo) {
    if (lo == hi) return 0;
    if (auto it = memo.find({lo, hi}); it != memo.end()) return it->second;
    const int len = hi - lo + 1;
    int best = 1 << 20;
    for (unsigned mask = 1; mask < (1u << (len - 1)); ++mask) {  // cut after position i when bit i set
        std::vector<std::pair<int, int>> parts;
        int start = lo;
        for (int i = 0; i < len - 1; ++i) {
            if (mask >> i & 1u) {
                parts.emplace_back(start, lo + i);
                start = lo + i + 1;
            }
        }
        parts.emplace_back(start, hi);
        bool ok = true;
        for (auto [a, b] : parts) ok = ok && is_block(p, a, b);
        if (!ok) continue;
        int worst = static_cast<int>(parts.size());
        for (auto [a, b] : parts) worst = std::max(worst, min_fanout(p, a, b, memo));
        best = std::min(best, worst);
    }
    memo[{lo, hi}] = best;
    return best;
}

// Random tree shape over [1, n], ignoring the block property.
DecompositionTree random_shape(std::mt19937& rng, const Permutation& p) {
    std::vector<BlockNode> nodes;
    std::function<int(int, int)> build = [&](int lo, int hi) -> int {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({lo, hi, 0, 0, -1, {}});
        if (lo == hi) return id;
        std::vector<int> cuts;
        for (int t = lo; t < hi; ++t)
            if (rng() % 2) cuts.push_back(t);
        if (cuts.empty()) cuts.push_back(lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo)));
        int start = lo;
        std::vector<int> kids;
        for (int c : cuts) {
            kids.push_back(build(start, c));
            start = c + 1;
        }
        kids.push_back(build(start, hi));
        nodes[static_cast<std::size_t>(id)].children = kids;
        return id;
    };
    build(1, p.size());
    return DecompositionTree::assemble(std::move(nodes), p);
}

}  // namespace

TEST(Generate, Examples) {
    const auto one = generate_k_decomposable(1, 3, 0);
    EXPECT_EQ(one.perm.to_string(), "1");
    EXPECT_EQ(one.tree.node_count(), 1u);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto g = generate_k_decomposable(5, 2, s);
        EXPECT_TRUE(validate_tree(g.perm, g.tree));
        EXPECT_LE(g.tree.max_fanout(), 2);
    }
    EXPECT_THROW(generate_k_decomposable(5, 1, 0), InputError);
}

TEST(Generate, DeterministicInSeed) {
    const auto a = generate_k_decomposable(100, 4, 17);
    const auto b = generate_k_decomposable(100, 4, 17);
    EXPECT_EQ(a.perm, b.perm);
    EXPECT_EQ(a.tree.serialize(), b.tree.serialize());
    EXPECT_NE(a.perm, generate_k_decomposable(100, 4, 18).perm);
}

// Pinned output: seeds must mean the same instance everywhere.
TEST(Generate, PinnedInstance) {
    const auto g = generate_k_decomposable(12, 3, 5);
    EXPECT_EQ(g.perm.to_string(), "6 4 5 3 2 12 7 8 9 10 11 1");
    EXPECT_EQ(g.tree.serialize(),
              "([1,12]([1,11]([1,5]([1,3]([1,1])([2,2])([3,3]))([4,5]([4,4])([5,5])))([6,11]([6,6])([7,7])([8,11]([8,8])"
              "([9,9])([10,11]([10,10])([11,11])))))([12,12]))");
    EXPECT_TRUE(validate_tree(g.perm, g.tree));
}

TEST(Generate, FanoutAndInferClosure) {
    for (int k : {2, 3, 4, 8, 16}) {
        for (int n : {2, 9, 33, 200}) {
            for (std::uint64_t s = 0; s < 5; ++s) {
                const auto g = generate_k_decomposable(n, k, s);
                ASSERT_TRUE(validate_tree(g.perm, g.tree));
                ASSERT_LE(g.tree.max_fanout(), k);
                const auto inf = infer_decomposition(g.perm);
                ASSERT_TRUE(validate_tree(g.perm, inf.tree));
                ASSERT_LE(inf.k, k) << "n=" << n << " k=" << k << " s=" << s;
            }
        }
    }
}

TEST(Infer, Examples) {
    const Permutation p({3, 1, 2, 5, 4});
    const auto inf = infer_decomposition(p);
    EXPECT_EQ(inf.k, 2);
    const auto& root = inf.tree.node(0);
    ASSERT_EQ(root.children.size(), 2u);
    const auto& a = inf.tree.node(root.children[0]);
    const auto& b = inf.tree.node(root.children[1]);
    EXPECT_EQ(std::pair(a.time_lo, a.time_hi), std::pair(1, 3));
    EXPECT_EQ(std::pair(a.key_lo, a.key_hi), std::pair(1, 3));
    EXPECT_EQ(std::pair(b.time_lo, b.time_hi), std::pair(4, 5));
    EXPECT_EQ(std::pair(b.key_lo, b.key_hi), std::pair(4, 5));

    for (int n : {2, 5, 30}) {
        const auto id = infer_decomposition(Permutation::identity(n));
        EXPECT_EQ(id.k, 2);
        EXPECT_TRUE(validate_tree(Permutation::identity(n), id.tree));
    }
    const auto simple = infer_decomposition(Permutation({2, 4, 1, 3}));
    EXPECT_EQ(simple.k, 4);
    EXPECT_EQ(simple.tree.node(0).children.size(), 4u);
}

TEST(Infer, MinimalFanoutAgainstExhaustiveSplits) {
    for (int n = 1; n <= 7; ++n) {
        std::vector<int> keys(static_cast<std::size_t>(n));
        std::iota(keys.begin(), keys.end(), 1);
        do {
            const Permutation p(keys);
            std::map<std::pair<int, int>, int> memo;
            const int want = std::max(n == 1 ? 0 : 2, min_fanout(p, 1, n, memo));
            const auto inf = infer_decomposition(p);
            ASSERT_TRUE(validate_tree(p, inf.tree)) << p.to_string();
            ASSERT_EQ(std::max(inf.k, n == 1 ? 0 : 2), want) << p.to_string();
        } while (std::next_permutation(keys.begin(), keys.end()));
    }
}

TEST(Validate, Examples) {
    const Permutation p({2, 4, 1, 3});
    std::vector<BlockNode> nodes{{1, 4, 0, 0, -1, {1, 2, 3}}, {1, 2, 0, 0, -1, {4, 5}}, {3, 3, 0, 0, -1, {}},
                                 {4, 4, 0, 0, -1, {}},        {1, 1, 0, 0, -1, {}},     {2, 2, 0, 0, -1, {}}};
    EXPECT_FALSE(validate_tree(p, DecompositionTree::assemble(nodes, p)));
    const Permutation one({1});
    EXPECT_TRUE(validate_tree(one, DecompositionTree::assemble({{1, 1, 0, 0, -1, {}}}, one)));
}

TEST(Validate, AgreesWithIntervalEnumeration) {
    std::mt19937 rng(31);
    int valid = 0;
    for (int iter = 0; iter < 3000; ++iter) {
        const int n = 1 + static_cast<int>(rng() % 10);
        std::vector<int> keys(static_cast<std::size_t>(n));
        std::iota(keys.begin(), keys.end(), 1);
        // Mostly near-monotone permutations so that some random shapes are valid.
        for (int s = static_cast<int>(rng() % 3); s > 0; --s)
            std::swap(keys[rng() % static_cast<unsigned>(n)], keys[rng() % static_cast<unsigned>(n)]);
        const Permutation p(keys);
        const auto tree = random_shape(rng, p);
        bool want = true;
        for (const auto& b : tree.nodes()) want = want && is_block(p, b.time_lo, b.time_hi);
        ASSERT_EQ(validate_tree(p, tree), want) << p.to_string() << " " << tree.serialize();
        valid += want;
    }
    EXPECT_GT(valid, 100);
}

TEST(Queries, Examples) {
    const Permutation p({3, 1, 2, 5, 4});
    const auto tree = infer_decomposition(p).tree;
    EXPECT_EQ(tree.rt(p.time_of(3)), tree.root());
    EXPECT_EQ(tree.top(tree.root(), p), (Point{3, 1}));
    const int right = tree.node(0).children[1];
    EXPECT_EQ(tree.siblings(right), std::vector<int>{tree.node(0).children[0]});
    EXPECT_EQ(tree.parent(right), 0);
    EXPECT_THROW(tree.parent(0), QueryError);
    EXPECT_THROW(tree.node(999), QueryError);
    EXPECT_THROW(tree.leaf_of_time(6), QueryError);
    for (int t = 1; t <= 5; ++t) EXPECT_EQ(tree.top_time(tree.rt(t)), t);
}

TEST(ParseTree, RoundTripAndErrors) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto g = generate_k_decomposable(40, 5, s);
        const auto back = parse_tree(g.tree.serialize(), g.perm);
        EXPECT_EQ(back.serialize(), g.tree.serialize());
        EXPECT_TRUE(validate_tree(g.perm, back));
    }
    const Permutation p({3, 1, 2, 5, 4});
    // Top-level siblings get an implicit root.
    const auto wrapped = parse_tree("([1,3]([1,1])([2,3]([2,2])([3,3])))([4,5]([4,4])([5,5]))", p);
    EXPECT_TRUE(validate_tree(p, wrapped));
    EXPECT_EQ(wrapped.node(0).time_hi, 5);
    EXPECT_THROW(parse_tree("([1,5]", p), InputError);
    EXPECT_THROW(parse_tree("([1,5]([1,2]))", p), InputError);
}
