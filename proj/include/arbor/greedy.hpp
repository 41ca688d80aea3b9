// The GREEDY sweep and the provenance links later analyses depend on.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "check.hpp"
#include "geometry.hpp"

namespace arbor {

/// X together with the marked points G that GREEDY adds.
class AugmentedPointSet {
public:
    AugmentedPointSet() = default;

    /// `marked[t]` lists the keys marked on row t (index 0 unused).
    AugmentedPointSet(Permutation perm, std::vector<std::vector<int>> marked)
        : perm_(std::move(perm)), marked_(std::move(marked)) {
        const int n = perm_.size();
        marked_.resize(static_cast<std::size_t>(n) + 1);
        std::vector<Point> pts;
        std::size_t total = 0;
        for (auto& row : marked_) {
            std::sort(row.begin(), row.end());
            total += row.size();
        }
        pts.reserve(static_cast<std::size_t>(n) + total);
        for (int t = 1; t <= n; ++t) {
            pts.push_back(perm_.original_at(t));
            for (int k : marked_[static_cast<std::size_t>(t)]) {
                if (k == perm_.key_at(t)) throw InvariantError("marked point coincides with an original");
                pts.push_back({k, t, Kind::Marked});
                marked_list_.push_back({k, t, Kind::Marked});
            }
        }
        set_ = PointSet(n, std::move(pts));
        index_ = RectangleIndex(n, set_.points());
        std::vector<Point> originals;
        for (int t = 1; t <= n; ++t) originals.push_back(perm_.original_at(t));
        original_index_ = RectangleIndex(n, originals);
    }

    int n() const { return perm_.size(); }
    const Permutation& permutation() const { return perm_; }
    const PointSet& points() const { return set_; }
    const RectangleIndex& index() const { return index_; }
    const RectangleIndex& original_index() const { return original_index_; }

    /// Marked points in (time, key) order.
    const std::vector<Point>& marked() const { return marked_list_; }
    const std::vector<int>& marked_row(int time) const { return marked_[static_cast<std::size_t>(time)]; }
    std::size_t marked_count() const { return marked_list_.size(); }

    bool is_original(const Point& p) const {
        return p.time >= 1 && p.time <= n() && perm_.key_at(p.time) == p.key;
    }
    bool is_marked(const Point& p) const {
        if (p.time < 1 || p.time > n()) return false;
        const auto& row = marked_row(p.time);
        return std::binary_search(row.begin(), row.end(), p.key);
    }
    bool contains(const Point& p) const { return is_original(p) || is_marked(p); }

    /// Look up the stored point (with its kind) at a cell.
    Point at(int key, int time) const {
        auto p = set_.find(key, time);
        if (!p) throw QueryError("no point at " + to_string(Point{key, time}));
        return *p;
    }

    /// The original on the same row.
    Point op(const Point& p) const {
        require(p);
        return perm_.original_at(p.time);
    }

    /// First original at or above p in its column.
    Point up(const Point& p) const {
        require(p);
        return perm_.original_of(p.key);  // the top of every column is its original
    }

    Point first_above(const Point& p) const {
        if (!is_marked(p)) throw QueryError("first_above: " + to_string(p) + " is not a marked point");
        auto above = point_above(p);
        if (!above) throw InvariantError("marked point " + to_string(p) + " has nothing above it");
        return *above;
    }

    /// Nearest point strictly above p in its column, if any.
    std::optional<Point> point_above(const Point& p) const {
        const auto& col = set_.column(p.key);
        auto it = std::lower_bound(col.begin(), col.end(), p.time);
        if (it == col.begin()) return std::nullopt;
        return at(p.key, *std::prev(it));
    }

    /// Nearest point strictly below p in its column, if any.
    std::optional<Point> point_below(const Point& p) const {
        const auto& col = set_.column(p.key);
        auto it = std::upper_bound(col.begin(), col.end(), p.time);
        if (it == col.end()) return std::nullopt;
        return at(p.key, *it);
    }

    /// Nearest point on p's row with a larger key.
    std::optional<Point> point_right(const Point& p) const {
        const auto& row = set_.row(p.time);
        auto it = std::upper_bound(row.begin(), row.end(), p.key);
        if (it == row.end()) return std::nullopt;
        return at(*it, p.time);
    }

    std::optional<Point> point_left(const Point& p) const {
        const auto& row = set_.row(p.time);
        auto it = std::lower_bound(row.begin(), row.end(), p.key);
        if (it == row.begin()) return std::nullopt;
        return at(*std::prev(it), p.time);
    }

    friend bool operator==(const AugmentedPointSet& a, const AugmentedPointSet& b) {
        return a.perm_ == b.perm_ && a.marked_ == b.marked_;
    }

private:
    void require(const Point& p) const {
        if (!contains(p)) throw QueryError(to_string(p) + " is not in the augmented set");
    }

    Permutation perm_;
    std::vector<std::vector<int>> marked_;
    std::vector<Point> marked_list_;
    PointSet set_;
    RectangleIndex index_;
    RectangleIndex original_index_;
};

/// Staircase sweep. last[x] is the latest time of any point in column x; the
/// columns marked on row t are the strict running maxima of last[] walking
/// away from the accessed key.
inline AugmentedPointSet greedy_sweep(const Permutation& perm) {
    const int n = perm.size();
    std::vector<int> last(static_cast<std::size_t>(n) + 2, 0);
    std::vector<std::vector<int>> marked(static_cast<std::size_t>(n) + 1);
    std::vector<int> left, right;
    for (int t = 1; t <= n; ++t) {
        const int x = perm.key_at(t);
        left.clear();
        right.clear();
        int m = last[static_cast<std::size_t>(x)];
        for (int y = x - 1; y >= 1 && m < t - 1; --y) {
            const int ly = last[static_cast<std::size_t>(y)];
            if (ly > m) {
                left.push_back(y);
                m = ly;
            }
        }
        m = last[static_cast<std::size_t>(x)];
        for (int y = x + 1; y <= n && m < t - 1; ++y) {
            const int ly = last[static_cast<std::size_t>(y)];
            if (ly > m) {
                right.push_back(y);
                m = ly;
            }
        }
        auto& row = marked[static_cast<std::size_t>(t)];
        row.assign(left.rbegin(), left.rend());
        row.insert(row.end(), right.begin(), right.end());
        for (int y : row) last[static_cast<std::size_t>(y)] = t;
        last[static_cast<std::size_t>(x)] = t;
    }
    return AugmentedPointSet(perm, std::move(marked));
}

namespace detail {

// Point-update / prefix-sum over an n x n grid.
class Fenwick2D {
public:
    explicit Fenwick2D(int n) : n_(n), tree_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0) {}

    void add(int key, int time) {
        for (int i = key; i <= n_; i += i & -i)
            for (int j = time; j <= n_; j += j & -j) ++tree_[idx(i, j)];
    }

    int prefix(int key, int time) const {
        int s = 0;
        for (int i = key; i > 0; i -= i & -i)
            for (int j = time; j > 0; j -= j & -j) s += tree_[idx(i, j)];
        return s;
    }

    int count(int klo, int khi, int tlo, int thi) const {
        if (klo > khi || tlo > thi) return 0;
        return prefix(khi, thi) - prefix(klo - 1, thi) - prefix(khi, tlo - 1) + prefix(klo - 1, tlo - 1);
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j);
    }
    int n_;
    std::vector<int> tree_;
};

}  // namespace detail

/// The definition executed literally: when the original at time t arrives,
/// every earlier point whose rectangle with it holds no third point gets its
/// opposite corner marked on row t. Quadratic; kept as an oracle.
inline AugmentedPointSet greedy_sweep_reference(const Permutation& perm) {
    const int n = perm.size();
    detail::Fenwick2D grid(n);
    std::vector<Point> seen;
    std::vector<std::vector<int>> marked(static_cast<std::size_t>(n) + 1);
    for (int t = 1; t <= n; ++t) {
        const int x = perm.key_at(t);
        auto& row = marked[static_cast<std::size_t>(t)];
        for (const Point& q : seen) {
            if (q.key == x) continue;
            const int klo = std::min(q.key, x), khi = std::max(q.key, x);
            // Points strictly before t inside the rectangle, q included.
            if (grid.count(klo, khi, q.time, t - 1) == 1) row.push_back(q.key);
        }
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        seen.push_back({x, t, Kind::Original});
        grid.add(x, t);
        for (int k : row) {
            seen.push_back({k, t, Kind::Marked});
            grid.add(k, t);
        }
    }
    return AugmentedPointSet(perm, std::move(marked));
}

inline Point first_above(const AugmentedPointSet& aug, const Point& p) { return aug.first_above(p); }

// ---------------------------------------------------------------------------
// Structural properties of GREEDY output.

/// Column tops are originals and every marked point has something above it.
inline CheckOutcome check_nothing_above(const AugmentedPointSet& aug) {
    CheckOutcome out;
    for (int k = 1; k <= aug.n(); ++k) {
        const auto& col = aug.points().column(k);
        out.note("nothing-above");
        if (col.empty() || col.front() != aug.permutation().time_of(k)) {
            out.fail("nothing-above", "column " + std::to_string(k) + " does not start with its original");
        }
    }
    return out;
}

/// For every p, no point q NE (resp. NW) of p escapes the closest points above
/// and beside p. Equivalent to the pairwise statement; see the exhaustive form.
inline CheckOutcome check_greedy_property(const AugmentedPointSet& aug) {
    CheckOutcome out;
    const int n = aug.n();
    for (const Point& p : aug.points().points()) {
        const auto above = aug.point_above(p);
        const int ta = above ? above->time : 0;
        const auto right = aug.point_right(p);
        const auto left = aug.point_left(p);
        const int kb = right ? right->key : n + 1;
        const int kl = left ? left->key : 0;
        out.note("greedy-property");
        out.note("greedy-property-left");
        if (!aug.index().empty(p.key + 1, kb - 1, ta + 1, p.time - 1)) {
            out.fail("greedy-property", "point NE of " + to_string(p) + " with no witness above or right");
        }
        if (!aug.index().empty(kl + 1, p.key - 1, ta + 1, p.time - 1)) {
            out.fail("greedy-property-left", "point NW of " + to_string(p) + " with no witness above or left");
        }
    }
    return out;
}

/// For every marked s, the rectangle between the point above s and OP(s) held
/// no other point before row time(s). This is what both hidden lemmas rest on:
/// any r that could play the hiding point lies in that region.
inline CheckOutcome check_hidden(const AugmentedPointSet& aug) {
    CheckOutcome out;
    for (const Point& s : aug.marked()) {
        const Point o = aug.op(s);
        const Point t = aug.first_above(s);
        if (o.key > s.key) {
            out.note("hidden");
            if (!aug.index().empty(s.key + 1, o.key, t.time, s.time - 1)) {
                out.fail("hidden", "point between " + to_string(t) + " and " + to_string(o) + " yet " +
                                       to_string(s) + " was marked");
            }
        } else {
            out.note("hidden-right");
            if (!aug.index().empty(o.key, s.key - 1, t.time, s.time - 1)) {
                out.fail("hidden-right", "point between " + to_string(t) + " and " + to_string(o) + " yet " +
                                             to_string(s) + " was marked");
            }
        }
    }
    return out;
}

/// Literal pairwise form of greedy-property(+left). O(m^3); small n only.
inline CheckOutcome check_greedy_property_exhaustive(const AugmentedPointSet& aug) {
    CheckOutcome out;
    const auto pts = aug.points().points();
    for (const Point& p : pts) {
        for (const Point& q : pts) {
            const Relation rel = relate(p, q);
            if (rel != Relation::NE && rel != Relation::NW) continue;
            const int klo = std::min(p.key, q.key), khi = std::max(p.key, q.key);
            bool found = false;
            for (const Point& r : pts) {
                if (r == p || r == q) continue;
                if (r.key < klo || r.key > khi || r.time < q.time || r.time > p.time) continue;
                const Relation pr = relate(p, r);
                if (pr == Relation::Above || (rel == Relation::NE && pr == Relation::Right) ||
                    (rel == Relation::NW && pr == Relation::Left)) {
                    found = true;
                    break;
                }
            }
            const char* name = rel == Relation::NE ? "greedy-property" : "greedy-property-left";
            out.note(name);
            if (!found) out.fail(name, to_string(p) + " / " + to_string(q));
        }
    }
    return out;
}

/// Literal triple scan of both hidden lemmas. O(m^3 log m); small n only.
inline CheckOutcome check_hidden_exhaustive(const AugmentedPointSet& aug) {
    CheckOutcome out;
    const auto pts = aug.points().points();
    for (const Point& q : pts) {
        for (const Point& p : pts) {
            const Relation qp = relate(q, p);
            const bool left_case = qp == Relation::SE;   // q NW of p
            const bool right_case = qp == Relation::SW;  // q NE of p
            if (!left_case && !right_case) continue;
            for (const Point& r : pts) {
                if (r == p || r == q) continue;
                const int klo = std::min(p.key, q.key), khi = std::max(p.key, q.key);
                const bool interior = r.key > klo && r.key < khi && r.time > q.time && r.time < p.time;
                const bool top_line = r.time == q.time && r.key >= klo && r.key <= khi;
                if (!interior && !top_line) continue;
                // s: first point below q in its column placed strictly after r's row.
                const auto& col = aug.points().column(q.key);
                auto it = std::upper_bound(col.begin(), col.end(), r.time);
                if (it == col.end()) continue;
                const Point s = aug.at(q.key, *it);
                const Point o = aug.op(s);
                const char* name = left_case ? "hidden" : "hidden-right";
                out.note(name);
                const bool holds = left_case ? relate(r, o) == Relation::SW : relate(r, o) == Relation::SE;
                if (!holds) {
                    out.fail(name, "p=" + to_string(p) + " q=" + to_string(q) + " r=" + to_string(r) +
                                       " s=" + to_string(s));
                }
            }
        }
    }
    return out;
}

inline CheckOutcome check_greedy_invariants(const AugmentedPointSet& aug) {
    CheckOutcome out = check_nothing_above(aug);
    out.merge(check_greedy_property(aug));
    out.merge(check_hidden(aug));
    return out;
}

}  // namespace arbor
