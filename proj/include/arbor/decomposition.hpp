// Block decomposition trees of permutations: generation, inference, queries.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace arbor {

struct BlockNode {
    int time_lo = 0, time_hi = 0;
    int key_lo = 0, key_hi = 0;
    int parent = -1;
    std::vector<int> children;  // ordered by time

    int size() const { return time_hi - time_lo + 1; }
    bool leaf() const { return children.empty(); }
};

class DecompositionTree {
public:
    DecompositionTree() = default;

    int root() const { return 0; }
    int n() const { return nodes_.empty() ? 0 : nodes_[0].size(); }
    std::size_t node_count() const { return nodes_.size(); }
    const BlockNode& node(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
            throw QueryError("no block with id " + std::to_string(id));
        }
        return nodes_[static_cast<std::size_t>(id)];
    }
    const std::vector<BlockNode>& nodes() const { return nodes_; }

    int max_fanout() const {
        std::size_t k = 0;
        for (const auto& b : nodes_) k = std::max(k, b.children.size());
        return static_cast<int>(k);
    }

    /// Time of Top(B): the earliest access inside the block.
    int top_time(int id) const { return node(id).time_lo; }
    Point top(int id, const Permutation& perm) const { return perm.original_at(top_time(id)); }

    int parent(int id) const {
        const int p = node(id).parent;
        if (p < 0) throw QueryError("the root has no parent");
        return p;
    }

    std::vector<int> siblings(int id) const {
        std::vector<int> out;
        for (int c : node(parent(id)).children)
            if (c != id) out.push_back(c);
        return out;
    }

    int leaf_of_time(int time) const {
        if (time < 1 || time > n()) throw QueryError("time " + std::to_string(time) + " outside the tree");
        return leaf_[static_cast<std::size_t>(time)];
    }

    /// Highest block whose Top is the original accessed at `time`.
    int rt(int time) const {
        int b = leaf_of_time(time);
        while (nodes_[static_cast<std::size_t>(b)].parent >= 0 &&
               nodes_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(b)].parent)].time_lo == time) {
            b = nodes_[static_cast<std::size_t>(b)].parent;
        }
        return b;
    }

    /// The child of `ancestor` that contains `time`, or -1.
    int child_containing(int ancestor, int time) const {
        for (int c : node(ancestor).children) {
            const auto& b = nodes_[static_cast<std::size_t>(c)];
            if (b.time_lo <= time && time <= b.time_hi) return c;
        }
        return -1;
    }

    bool contains_time(int id, int time) const {
        const auto& b = node(id);
        return b.time_lo <= time && time <= b.time_hi;
    }

    std::string serialize() const {
        std::string out;
        if (!nodes_.empty()) write(0, out);
        return out;
    }

    /// Build from parent-free node shells (time intervals + children). Key
    /// intervals, parents and leaf map are filled from the permutation.
    static DecompositionTree assemble(std::vector<BlockNode> nodes, const Permutation& perm) {
        DecompositionTree t;
        t.nodes_ = std::move(nodes);
        t.finish(perm);
        return t;
    }

private:
    void write(int id, std::string& out) const {
        const auto& b = nodes_[static_cast<std::size_t>(id)];
        out += "([" + std::to_string(b.time_lo) + "," + std::to_string(b.time_hi) + "]";
        for (int c : b.children) write(c, out);
        out += ")";
    }

    void finish(const Permutation& perm) {
        const int n = perm.size();
        leaf_.assign(static_cast<std::size_t>(n) + 1, -1);
        for (auto& b : nodes_) b.parent = -1;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            auto& b = nodes_[i];
            if (b.time_lo < 1 || b.time_hi > n || b.time_lo > b.time_hi) {
                throw InputError("block interval [" + std::to_string(b.time_lo) + "," + std::to_string(b.time_hi) +
                                 "] outside [1," + std::to_string(n) + "]");
            }
            int lo = n + 1, hi = 0;
            for (int t = b.time_lo; t <= b.time_hi; ++t) {
                lo = std::min(lo, perm.key_at(t));
                hi = std::max(hi, perm.key_at(t));
            }
            b.key_lo = lo;
            b.key_hi = hi;
            for (int c : b.children) {
                if (c <= 0 || static_cast<std::size_t>(c) >= nodes_.size()) throw InputError("bad child index");
                if (nodes_[static_cast<std::size_t>(c)].parent != -1) throw InputError("block with two parents");
                nodes_[static_cast<std::size_t>(c)].parent = static_cast<int>(i);
            }
            if (b.children.empty()) {
                if (b.time_lo != b.time_hi) throw InputError("leaf block spans more than one time");
                if (leaf_[static_cast<std::size_t>(b.time_lo)] != -1) throw InputError("two leaves for one time");
                leaf_[static_cast<std::size_t>(b.time_lo)] = static_cast<int>(i);
            }
        }
        for (int t = 1; t <= n; ++t)
            if (leaf_[static_cast<std::size_t>(t)] < 0) throw InputError("time " + std::to_string(t) + " has no leaf");
    }

    std::vector<BlockNode> nodes_;
    std::vector<int> leaf_;
};

/// Block property, child partition, singleton leaves and fanout >= 2.
inline bool validate_tree(const Permutation& perm, const DecompositionTree& tree) {
    const int n = perm.size();
    if (tree.node_count() == 0 || tree.n() != n) return false;
    const auto& root = tree.node(tree.root());
    if (root.time_lo != 1 || root.time_hi != n || root.parent != -1) return false;
    for (const auto& b : tree.nodes()) {
        int lo = n + 1, hi = 0;
        for (int t = b.time_lo; t <= b.time_hi; ++t) {
            lo = std::min(lo, perm.key_at(t));
            hi = std::max(hi, perm.key_at(t));
        }
        if (hi - lo != b.time_hi - b.time_lo) return false;
        if (lo != b.key_lo || hi != b.key_hi) return false;
        if (b.leaf()) {
            if (b.time_lo != b.time_hi) return false;
            continue;
        }
        if (b.children.size() < 2) return false;
        int expect = b.time_lo;
        for (int c : b.children) {
            const auto& ch = tree.node(c);
            if (ch.time_lo != expect) return false;
            expect = ch.time_hi + 1;
        }
        if (expect != b.time_hi + 1) return false;
    }
    return true;
}

/// Parse the nested interval form, e.g. `([1,2]([1,1])([2,2]))`. Several
/// top-level nodes are wrapped in an implicit root over [1, n].
inline DecompositionTree parse_tree(const std::string& text, const Permutation& perm) {
    std::vector<BlockNode> nodes(1);
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c) {
            throw InputError(std::string("tree: expected '") + c + "' at offset " + std::to_string(pos));
        }
        ++pos;
    };
    auto number = [&] {
        skip();
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos || pos - start > 9) throw InputError("tree: expected a number at offset " + std::to_string(start));
        return std::stoi(text.substr(start, pos - start));
    };
    // Iterative to survive deep chains.
    std::vector<int> stack;
    std::vector<int> top_level;
    skip();
    while (pos < text.size()) {
        skip();
        if (pos >= text.size()) break;
        if (text[pos] == '(') {
            ++pos;
            expect('[');
            BlockNode b;
            b.time_lo = number();
            expect(',');
            b.time_hi = number();
            expect(']');
            const int id = static_cast<int>(nodes.size());
            nodes.push_back(b);
            if (stack.empty()) top_level.push_back(id);
            else nodes[static_cast<std::size_t>(stack.back())].children.push_back(id);
            stack.push_back(id);
        } else if (text[pos] == ')') {
            if (stack.empty()) throw InputError("tree: unbalanced ')'");
            ++pos;
            stack.pop_back();
        } else {
            throw InputError(std::string("tree: unexpected '") + text[pos] + "'");
        }
        skip();
    }
    if (!stack.empty()) throw InputError("tree: unbalanced '('");
    if (top_level.empty()) throw InputError("tree: empty");
    if (top_level.size() == 1) {
        // The only top-level node was parsed first, right after the placeholder.
        nodes.erase(nodes.begin());
        for (auto& b : nodes)
            for (int& c : b.children) --c;
    } else {
        nodes[0].time_lo = 1;
        nodes[0].time_hi = perm.size();
        nodes[0].children = top_level;
    }
    auto tree = DecompositionTree::assemble(std::move(nodes), perm);
    if (!validate_tree(perm, tree)) throw InputError("tree does not decompose the permutation");
    return tree;
}

// ---------------------------------------------------------------------------
// Generation.

/// mt19937_64 with a bounded draw that does not depend on the standard
/// library's distribution implementation.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do v = engine_();
        while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(i) - 1))]);
        }
    }

private:
    std::mt19937_64 engine_;
};

struct GeneratedInstance {
    Permutation perm;
    DecompositionTree tree;
};

inline GeneratedInstance generate_k_decomposable(int n, int k, std::uint64_t seed) {
    if (k < 2) throw InputError("k must be >= 2");
    if (n < 1) throw InputError("n must be >= 1");
    PortableRng rng(seed);
    std::vector<int> keys(static_cast<std::size_t>(n) + 1, 0);
    std::vector<BlockNode> nodes;

    struct Task {
        int id, time_lo, size, key_lo;
    };
    nodes.push_back({});
    std::vector<Task> work{{0, 1, n, 1}};
    while (!work.empty()) {
        const Task task = work.back();
        work.pop_back();
        auto& self = nodes[static_cast<std::size_t>(task.id)];
        self.time_lo = task.time_lo;
        self.time_hi = task.time_lo + task.size - 1;
        if (task.size == 1) {
            keys[static_cast<std::size_t>(task.time_lo)] = task.key_lo;
            continue;
        }
        const int f = static_cast<int>(rng.uniform(2, std::min(k, task.size)));
        // f-1 distinct cut points in [1, size-1] (Floyd's sampling).
        std::vector<int> cuts;
        for (int j = task.size - f + 1; j <= task.size - 1; ++j) {
            const int c = static_cast<int>(rng.uniform(1, j));
            if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
            else cuts.push_back(j);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<int> sizes;
        int prev = 0;
        for (int c : cuts) {
            sizes.push_back(c - prev);
            prev = c;
        }
        sizes.push_back(task.size - prev);

        std::vector<int> pattern(static_cast<std::size_t>(f));
        for (int i = 0; i < f; ++i) pattern[static_cast<std::size_t>(i)] = i;
        rng.shuffle(pattern);
        // Child i takes the key rank pattern[i] among its siblings.
        std::vector<int> key_start(static_cast<std::size_t>(f));
        std::vector<int> by_rank(static_cast<std::size_t>(f));
        for (int i = 0; i < f; ++i) by_rank[static_cast<std::size_t>(pattern[static_cast<std::size_t>(i)])] = i;
        int acc = task.key_lo;
        for (int r = 0; r < f; ++r) {
            const int child = by_rank[static_cast<std::size_t>(r)];
            key_start[static_cast<std::size_t>(child)] = acc;
            acc += sizes[static_cast<std::size_t>(child)];
        }
        int t = task.time_lo;
        std::vector<int> ids;
        for (int i = 0; i < f; ++i) {
            const int id = static_cast<int>(nodes.size());
            nodes.push_back({});
            ids.push_back(id);
            work.push_back({id, t, sizes[static_cast<std::size_t>(i)], key_start[static_cast<std::size_t>(i)]});
            t += sizes[static_cast<std::size_t>(i)];
        }
        nodes[static_cast<std::size_t>(task.id)].children = std::move(ids);
    }
    Permutation perm(std::vector<int>(keys.begin() + 1, keys.end()));
    auto tree = DecompositionTree::assemble(std::move(nodes), perm);
    return {std::move(perm), std::move(tree)};
}

// ---------------------------------------------------------------------------
// Inference.

struct InferredTree {
    DecompositionTree tree;
    int k = 0;
};

/// Substitution decomposition with monotone runs split into binary nodes: a
/// span splits in two at the first prefix where both parts are blocks;
/// otherwise its quotient is simple and the children are the maximal proper
/// blocks, read left to right.
inline InferredTree infer_decomposition(const Permutation& perm) {
    const int n = perm.size();
    std::vector<BlockNode> nodes;
    nodes.push_back({});
    std::vector<std::pair<int, std::pair<int, int>>> work{{0, {1, n}}};
    std::vector<int> suf_lo(static_cast<std::size_t>(n) + 2), suf_hi(static_cast<std::size_t>(n) + 2);
    auto key = [&](int t) { return perm.key_at(t); };
    while (!work.empty()) {
        const auto [id, span] = work.back();
        work.pop_back();
        const auto [lo, hi] = span;
        nodes[static_cast<std::size_t>(id)].time_lo = lo;
        nodes[static_cast<std::size_t>(id)].time_hi = hi;
        if (lo == hi) continue;

        suf_lo[static_cast<std::size_t>(hi)] = suf_hi[static_cast<std::size_t>(hi)] = key(hi);
        for (int t = hi - 1; t >= lo; --t) {
            suf_lo[static_cast<std::size_t>(t)] = std::min(suf_lo[static_cast<std::size_t>(t + 1)], key(t));
            suf_hi[static_cast<std::size_t>(t)] = std::max(suf_hi[static_cast<std::size_t>(t + 1)], key(t));
        }
        std::vector<std::pair<int, int>> parts;
        int plo = n + 1, phi = 0;
        for (int t = lo; t < hi; ++t) {
            plo = std::min(plo, key(t));
            phi = std::max(phi, key(t));
            if (phi - plo == t - lo &&
                suf_hi[static_cast<std::size_t>(t + 1)] - suf_lo[static_cast<std::size_t>(t + 1)] == hi - t - 1) {
                parts = {{lo, t}, {t + 1, hi}};
                break;
            }
        }
        if (parts.empty()) {
            for (int start = lo; start <= hi;) {
                int best = start;
                int blo = n + 1, bhi = 0;
                for (int t = start; t <= hi; ++t) {
                    blo = std::min(blo, key(t));
                    bhi = std::max(bhi, key(t));
                    if (bhi - blo == t - start && !(start == lo && t == hi)) best = t;
                }
                parts.emplace_back(start, best);
                start = best + 1;
            }
        }
        for (const auto& part : parts) {
            const int cid = static_cast<int>(nodes.size());
            nodes.push_back({});
            nodes[static_cast<std::size_t>(id)].children.push_back(cid);
            work.push_back({cid, part});
        }
    }
    auto tree = DecompositionTree::assemble(std::move(nodes), perm);
    const int k = tree.max_fanout();
    return {std::move(tree), k};
}

}  // namespace arbor
