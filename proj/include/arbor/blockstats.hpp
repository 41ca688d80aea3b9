// Block-level accounting: regions around a block, Left/Right marks,
// relatives, key-new/key-old ledgers, and the partition-tree counts.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "check.hpp"
#include "decomposition.hpp"
#include "greedy.hpp"
#include "pairs.hpp"

namespace arbor {

/// Half-open-free region: keys [key_lo, key_hi] x times [time_lo, time_hi].
struct Region {
    int key_lo = 1, key_hi = 0, time_lo = 1, time_hi = 0;
    bool empty() const { return key_lo > key_hi || time_lo > time_hi; }
    bool contains(const Point& p) const {
        return p.key >= key_lo && p.key <= key_hi && p.time >= time_lo && p.time <= time_hi;
    }
};

struct BlockGeometry {
    int block = 0;
    Point mint, maxt, mink, maxk;  // originals
    Region box;
    Region upb;                     // the columns of B above its first access
    Region rg;                      // the columns of B below it, down to the parent's last access
    std::optional<Point> left, right;
};

enum class KeyTag : std::uint8_t { KeyNew, KeyOld };

struct LedgerEntry {
    Point point;
    KeyTag tag = KeyTag::KeyNew;
};

struct KeyLedger {
    std::vector<LedgerEntry> entries;          // in (time, key) order
    std::vector<std::pair<int, int>> live;     // (t, C_t) for each t in the parent's span plus one
    int live_at(int t) const {
        for (const auto& [tt, c] : live)
            if (tt == t) return c;
        return 0;
    }
};

/// Precomputed per-instance data shared by every block query.
class BlockContext {
public:
    BlockContext(const AugmentedPointSet& aug, const DecompositionTree& tree, const Classification& cls)
        : aug_(aug), tree_(tree), cls_(cls) {
        if (!validate_tree(aug.permutation(), tree)) throw InputError("decomposition tree does not match the permutation");
        const int n = aug.n();
        row_start_.assign(static_cast<std::size_t>(n) + 2, 0);
        for (int t = 1; t <= n; ++t) {
            row_start_[static_cast<std::size_t>(t + 1)] =
                row_start_[static_cast<std::size_t>(t)] + aug.marked_row(t).size();
        }
        const std::size_t m = aug.marked_count();
        rg_block_.assign(m, -1);
        key_new_.assign(m, false);
        // Column c lies in every ancestor of its original's leaf; a mark at
        // time t belongs to the ancestor B with time_hi(B) < t <= time_hi(P(B)).
        for (int c = 1; c <= n; ++c) {
            int b = tree.leaf_of_time(aug.permutation().time_of(c));
            int last_block = -1;
            for (int t : aug.points().column(c)) {
                if (t == aug.permutation().time_of(c)) continue;
                while (tree.node(b).parent >= 0 && tree.node(tree.node(b).parent).time_hi < t) b = tree.node(b).parent;
                const std::size_t idx = index_of({c, t});
                rg_block_[idx] = b;
                key_new_[idx] = b != last_block;
                last_block = b;
            }
        }
    }

    const AugmentedPointSet& aug() const { return aug_; }
    const DecompositionTree& tree() const { return tree_; }
    const Classification& cls() const { return cls_; }

    /// Position of a marked point in aug.marked().
    std::size_t index_of(const Point& p) const {
        const auto& row = aug_.marked_row(p.time);
        auto it = std::lower_bound(row.begin(), row.end(), p.key);
        if (it == row.end() || *it != p.key) throw QueryError(to_string(p) + " is not marked");
        return row_start_[static_cast<std::size_t>(p.time)] + static_cast<std::size_t>(it - row.begin());
    }

    /// The block whose region RG holds the marked point.
    int rg_block(std::size_t idx) const { return rg_block_[idx]; }
    bool key_new(std::size_t idx) const { return key_new_[idx]; }

    /// Nearest marks left/right of Top(B) on its row.
    std::optional<Point> left(int b) const {
        const Point top = tree_.top(b, aug_.permutation());
        auto l = aug_.point_left(top);
        return l;
    }
    std::optional<Point> right(int b) const {
        const Point top = tree_.top(b, aug_.permutation());
        return aug_.point_right(top);
    }

    /// LeftRel(B): the first original after B (within its parent) with key
    /// below Left(B), and the first with key between Left(B) and B. A missing
    /// Left(B) counts as key 0.
    std::vector<int> left_rel_times(int b) const {
        const auto& node = tree_.node(b);
        const int kl = left(b) ? left(b)->key : 0;
        const int end = node.parent >= 0 ? tree_.node(node.parent).time_hi : aug_.n();
        std::optional<int> below, between;
        for (int t = node.time_hi + 1; t <= end && (!below || !between); ++t) {
            const int k = aug_.permutation().key_at(t);
            if (!below && k < kl) below = t;
            if (!between && k > kl && k < node.key_lo) between = t;
        }
        std::vector<int> out;
        if (below) out.push_back(*below);
        if (between) out.push_back(*between);
        return out;
    }

    std::vector<int> right_rel_times(int b) const {
        const auto& node = tree_.node(b);
        const int kr = right(b) ? right(b)->key : aug_.n() + 1;
        const int end = node.parent >= 0 ? tree_.node(node.parent).time_hi : aug_.n();
        std::optional<int> above, between;
        for (int t = node.time_hi + 1; t <= end && (!above || !between); ++t) {
            const int k = aug_.permutation().key_at(t);
            if (!above && k > kr) above = t;
            if (!between && k < kr && k > node.key_hi) between = t;
        }
        std::vector<int> out;
        if (above) out.push_back(*above);
        if (between) out.push_back(*between);
        return out;
    }

    Region rg_region(int b) const {
        const auto& node = tree_.node(b);
        if (node.parent < 0) return {node.key_lo, node.key_hi, 1, 0};
        return {node.key_lo, node.key_hi, node.time_hi + 1, tree_.node(node.parent).time_hi};
    }

private:
    const AugmentedPointSet& aug_;
    const DecompositionTree& tree_;
    const Classification& cls_;
    std::vector<std::size_t> row_start_;
    std::vector<int> rg_block_;
    std::vector<bool> key_new_;
};

inline BlockGeometry block_geometry(const BlockContext& ctx, int b) {
    const auto& perm = ctx.aug().permutation();
    const auto& node = ctx.tree().node(b);
    BlockGeometry g;
    g.block = b;
    g.mint = perm.original_at(node.time_lo);
    g.maxt = perm.original_at(node.time_hi);
    g.mink = perm.original_of(node.key_lo);
    g.maxk = perm.original_of(node.key_hi);
    g.box = {node.key_lo, node.key_hi, node.time_lo, node.time_hi};
    g.upb = {node.key_lo, node.key_hi, 1, node.time_lo - 1};
    g.rg = ctx.rg_region(b);
    g.left = ctx.left(b);
    g.right = ctx.right(b);
    return g;
}

inline BlockGeometry block_geometry(const AugmentedPointSet& aug, const DecompositionTree& tree, int b) {
    const Classification cls = classify_all(aug);
    const BlockContext ctx(aug, tree, cls);
    return block_geometry(ctx, b);
}

namespace detail {

/// Live keys at time t among region points sorted by time: a key is live when
/// some point of it came before t and no point of another key came at or
/// after that point and before t.
inline int live_count(const std::vector<Point>& pts, int t) {
    // The last row before t decides everything: any earlier point of a key is
    // followed by that row, which holds another key unless it is the only one.
    int last = 0;
    for (const auto& p : pts)
        if (p.time < t) last = std::max(last, p.time);
    if (last == 0) return 0;
    std::vector<int> keys;
    for (const auto& p : pts)
        if (p.time == last) keys.push_back(p.key);
    return keys.size() == 1 ? 1 : 0;
}

}  // namespace detail

/// Tags and live counts for the union of RG over `window` (children of one node).
inline KeyLedger key_ledger(const BlockContext& ctx, const std::vector<int>& window) {
    KeyLedger led;
    if (window.empty()) return led;
    const int parent = ctx.tree().node(window.front()).parent;
    std::vector<Point> pts;
    for (std::size_t i = 0; i < ctx.aug().marked().size(); ++i) {
        const int b = ctx.rg_block(i);
        if (std::find(window.begin(), window.end(), b) == window.end()) continue;
        const Point& p = ctx.aug().marked()[i];
        pts.push_back(p);
        led.entries.push_back({p, ctx.key_new(i) ? KeyTag::KeyNew : KeyTag::KeyOld});
    }
    if (parent >= 0) {
        const auto& pn = ctx.tree().node(parent);
        for (int t = pn.time_lo; t <= pn.time_hi + 1; ++t) led.live.emplace_back(t, detail::live_count(pts, t));
    }
    return led;
}

inline KeyLedger key_ledger(const AugmentedPointSet& aug, const DecompositionTree& tree, const std::vector<int>& window) {
    const Classification cls = classify_all(aug);
    const BlockContext ctx(aug, tree, cls);
    return key_ledger(ctx, window);
}

/// Counters gathered for one split of one node's partition tree, in one direction.
struct WindowCounts {
    int parent = 0;
    int first = 0, mid = 0, last = 0;  // key-order child positions: sources [first,mid), targets [mid,last) or mirrored
    bool mirrored = false;
    int m = 0;
    int key_old = 0;
    int zig = 0;
    int observable = 0;
};

struct LemmaReport {
    CheckOutcome outcome;
    std::vector<WindowCounts> windows;

    nlohmann::json to_json() const {
        // One entry per (check, block, window); checks with no violation get a
        // single clean entry so every family that ran is listed.
        using Key = std::tuple<std::string, int, int, int>;
        std::map<Key, std::vector<std::string>> grouped;
        for (const auto& v : outcome.violations) {
            grouped[{v.check, v.block.value_or(-1), v.window ? v.window->first : -1, v.window ? v.window->second : -1}]
                .push_back(v.detail);
        }
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [name, count] : outcome.evaluated) {
            bool any = false;
            for (const auto& [key, details] : grouped) {
                if (std::get<0>(key) != name) continue;
                any = true;
                nlohmann::json e{{"check", name}, {"evaluated", count}, {"violations", details}};
                e["block"] = std::get<1>(key) >= 0 ? nlohmann::json(std::get<1>(key)) : nlohmann::json(nullptr);
                e["window"] = std::get<2>(key) >= 0 ? nlohmann::json::array({std::get<2>(key), std::get<3>(key)})
                                                    : nlohmann::json(nullptr);
                out.push_back(std::move(e));
            }
            if (!any) {
                out.push_back({{"check", name}, {"evaluated", count}, {"block", nullptr}, {"window", nullptr},
                               {"violations", nlohmann::json::array()}});
            }
        }
        return out;
    }
};

inline LemmaReport check_block_lemmas(const BlockContext& ctx) {
    LemmaReport rep;
    CheckOutcome& out = rep.outcome;
    const auto& aug = ctx.aug();
    const auto& tree = ctx.tree();
    const auto& perm = aug.permutation();
    const auto& cls = ctx.cls();
    const int n = aug.n();

    // Per node: upperbox, topnotinbox, Left/Right sides of the block.
    for (int b = 0; b < static_cast<int>(tree.node_count()); ++b) {
        const auto& node = tree.node(b);
        out.note("upperbox");
        if (!aug.index().empty(node.key_lo, node.key_hi, 1, node.time_lo - 1)) {
            out.fail("upperbox", "point above block [" + std::to_string(node.time_lo) + "," +
                                     std::to_string(node.time_hi) + "]", b);
        }
        out.note("topnotinbox");
        const auto& row = aug.marked_row(node.time_lo);
        auto it = std::lower_bound(row.begin(), row.end(), node.key_lo);
        if (it != row.end() && *it <= node.key_hi) {
            out.fail("topnotinbox", "mark (" + std::to_string(*it) + "," + std::to_string(node.time_lo) +
                                        ") inside the block of its top", b);
        }
        const auto l = ctx.left(b), r = ctx.right(b);
        out.note("left-right-keys");
        if ((l && l->key >= node.key_lo) || (r && r->key <= node.key_hi)) {
            out.fail("left-right-keys", "Left/Right of block inside its key range", b);
        }
    }

    // blockleftright: every row except the root's top.
    for (int t = 1; t <= n; ++t) {
        const int bp = tree.rt(t);
        const int b = tree.node(bp).parent;
        if (b < 0) continue;
        const auto& node = tree.node(b);
        const auto l = ctx.left(b), r = ctx.right(b);
        for (int c : aug.marked_row(t)) {
            out.note("blockleftright");
            if ((l && c == l->key) || (r && c == r->key)) continue;
            if (c < node.key_lo || c > node.key_hi) {
                out.fail("blockleftright", "mark (" + std::to_string(c) + "," + std::to_string(t) +
                                               ") outside the parent block and not below Left/Right", b);
                continue;
            }
            const int sib = tree.child_containing(b, perm.time_of(c));
            const std::size_t idx = ctx.index_of({c, t});
            if (sib == bp || ctx.rg_block(idx) != sib) {
                out.fail("blockleftright", "mark (" + std::to_string(c) + "," + std::to_string(t) +
                                               ") in the parent box but not in a sibling's region", b);
            }
        }
    }

    // Key-new points: only relatives create them, and their pairs are zag.
    {
        std::vector<std::optional<std::vector<int>>> rel(tree.node_count());
        for (std::size_t i = 0; i < aug.marked().size(); ++i) {
            if (!ctx.key_new(i)) continue;
            const int b = ctx.rg_block(i);
            if (!rel[static_cast<std::size_t>(b)]) {
                auto v = ctx.left_rel_times(b);
                const auto w = ctx.right_rel_times(b);
                v.insert(v.end(), w.begin(), w.end());
                rel[static_cast<std::size_t>(b)] = std::move(v);
            }
            const Point& p = aug.marked()[i];
            const auto& times = *rel[static_cast<std::size_t>(b)];
            out.note("pointotherthanrel");
            const bool from_rel = std::find(times.begin(), times.end(), p.time) != times.end();
            if (!from_rel) {
                out.fail("pointotherthanrel", "key-new point " + to_string(p) + " created by a non-relative", b);
                continue;
            }
            out.note("key-newinmfc");
            if (cls.records[i].cls != PairClass::Zag) {
                out.fail("key-newinmfc", "key-new point " + to_string(p) + " from a relative has a zig pair", b);
            }
        }
    }

    // mmc-witness along each row, both sides.
    for (int t = 1; t <= n; ++t) {
        const auto& row = aug.marked_row(t);
        const Point p = perm.original_at(t);
        std::vector<Point> right_zig, left_zig;
        for (int c : row) {
            const std::size_t idx = ctx.index_of({c, t});
            if (cls.records[idx].cls != PairClass::Zig) continue;
            (c > p.key ? right_zig : left_zig).push_back(cls.records[idx].q_above);
        }
        std::reverse(left_zig.begin(), left_zig.end());  // nearest to p first
        auto scan = [&](const std::vector<Point>& tops, bool right) {
            for (std::size_t i = 0; i + 1 < tops.size(); ++i) {
                const Point r1 = tops[i], r2 = tops[i + 1];
                out.note("mmc-witness");
                const Relation rel = relate(r1, r2);
                if (rel != (right ? Relation::SE : Relation::SW)) {
                    out.fail("mmc-witness", "rectangle tops " + to_string(r1) + " " + to_string(r2) +
                                                " on row " + std::to_string(t) + " are not a staircase");
                    continue;
                }
                const bool found = right ? !aug.original_index().empty(r1.key + 1, n, r1.time + 1, r2.time - 1)
                                         : !aug.original_index().empty(1, r1.key - 1, r1.time + 1, r2.time - 1);
                if (!found) {
                    out.fail("mmc-witness", "no original between " + to_string(r1) + " and " + to_string(r2) +
                                                " for row " + std::to_string(t));
                }
            }
        };
        scan(right_zig, true);
        scan(left_zig, false);
    }

    // Partition trees: for every node, halve its children in key order and
    // count what tops of one half put into the region of the other.
    for (int b = 0; b < static_cast<int>(tree.node_count()); ++b) {
        const auto& node = tree.node(b);
        if (node.leaf()) continue;
        std::vector<int> by_key = node.children;
        std::sort(by_key.begin(), by_key.end(),
                  [&](int x, int y) { return tree.node(x).key_lo < tree.node(y).key_lo; });
        const int l = static_cast<int>(by_key.size());
        std::vector<int> pos_of_child(tree.node_count(), -1);  // sparse but cheap relative to the rest
        for (int i = 0; i < l; ++i) pos_of_child[static_cast<std::size_t>(by_key[static_cast<std::size_t>(i)])] = i;

        // Windows of the partition tree, keyed by (first, last).
        struct Split {
            int first, mid, last;
            WindowCounts fwd, back;  // fwd: tops of [first,mid) into RG([mid,last)); back: mirrored
        };
        std::vector<Split> splits;
        std::vector<std::pair<int, int>> stack{{0, l}};
        while (!stack.empty()) {
            const auto [f, e] = stack.back();
            stack.pop_back();
            if (e - f < 2) continue;
            const int mid = f + (e - f) / 2;
            const int m = std::max(mid - f, e - mid);
            Split s{f, mid, e, {b, f, mid, e, false, m, 0, 0, 0}, {b, f, mid, e, true, m, 0, 0, 0}};
            splits.push_back(s);
            stack.emplace_back(f, mid);
            stack.emplace_back(mid, e);
        }
        auto find_split = [&](int i, int j) -> Split* {
            int f = 0, e = l;
            while (e - f >= 2) {
                const int mid = f + (e - f) / 2;
                if ((i < mid) != (j < mid)) {
                    for (auto& s : splits)
                        if (s.first == f && s.last == e) return &s;
                    return nullptr;
                }
                if (i < mid) e = mid;
                else f = mid;
            }
            return nullptr;
        };

        // Marks in RG of a child of b, created on the row of another child's top.
        for (int target_child : node.children) {
            const Region rg = ctx.rg_region(target_child);
            for (int t = rg.time_lo; t <= rg.time_hi; ++t) {
                const auto& row = aug.marked_row(t);
                auto it = std::lower_bound(row.begin(), row.end(), rg.key_lo);
                for (; it != row.end() && *it <= rg.key_hi; ++it) {
                    const std::size_t idx = ctx.index_of({*it, t});
                    const int src_child = tree.child_containing(b, t);
                    if (src_child < 0 || tree.node(src_child).time_lo != t || t == node.time_lo) continue;
                    const int i = pos_of_child[static_cast<std::size_t>(src_child)];
                    const int j = pos_of_child[static_cast<std::size_t>(target_child)];
                    Split* s = find_split(i, j);
                    if (!s) continue;
                    WindowCounts& w = i < j ? s->fwd : s->back;
                    if (!ctx.key_new(idx)) ++w.key_old;
                    const auto& rec = cls.records[idx];
                    if (rec.cls == PairClass::Zig) ++w.zig;
                    if (rec.goodness == Goodness::Bad && cls.amc[idx].kind == AmcKind::Observable) ++w.observable;
                }
            }
        }
        for (const auto& s : splits) {
            for (const WindowCounts* w : {&s.fwd, &s.back}) {
                const std::pair<int, int> win{w->first, w->last - 1};
                out.note("partitionlemma");
                if (w->key_old > 12 * w->m || w->zig > 12 * w->m) {
                    out.fail("partitionlemma", "key-old " + std::to_string(w->key_old) + ", zig " +
                                                   std::to_string(w->zig) + " exceed 12m with m=" + std::to_string(w->m),
                             b, win);
                }
                out.note("mfcpartitionlemma");
                if (w->observable > 14 * w->m) {
                    out.fail("mfcpartitionlemma", "observable " + std::to_string(w->observable) + " exceeds 14m with m=" +
                                                      std::to_string(w->m), b, win);
                }
                rep.windows.push_back(*w);
            }
        }

        // Live-key timeline over each target half.
        for (const auto& s : splits) {
            for (int half = 0; half < 2; ++half) {
                const int f = half == 0 ? s.mid : s.first;
                const int e = half == 0 ? s.last : s.mid;
                std::vector<Point> pts;
                for (int i = f; i < e; ++i) {
                    const Region rg = ctx.rg_region(by_key[static_cast<std::size_t>(i)]);
                    for (int t = rg.time_lo; t <= rg.time_hi; ++t) {
                        const auto& row = aug.marked_row(t);
                        auto it = std::lower_bound(row.begin(), row.end(), rg.key_lo);
                        for (; it != row.end() && *it <= rg.key_hi; ++it) pts.push_back({*it, t, Kind::Marked});
                    }
                }
                const std::pair<int, int> win{f, e - 1};
                out.note("key-livesameblock");
                if (detail::live_count(pts, node.time_lo) != 0) {
                    out.fail("key-livesameblock", "live keys at the parent's top", b, win);
                }
                for (int i = f; i < e; ++i) {
                    const auto& ch = tree.node(by_key[static_cast<std::size_t>(i)]);
                    const int before = detail::live_count(pts, ch.time_lo);
                    const int after = detail::live_count(pts, ch.time_hi + 1);
                    if (before < 0 || after > before + 4) {
                        out.fail("key-livesameblock", "live count grows from " + std::to_string(before) + " to " +
                                                          std::to_string(after), b, win);
                    }
                }
            }
        }
    }
    return rep;
}

inline LemmaReport check_block_lemmas(const AugmentedPointSet& aug, const DecompositionTree& tree) {
    const Classification cls = classify_all(aug);
    const BlockContext ctx(aug, tree, cls);
    return check_block_lemmas(ctx);
}

}  // namespace arbor
