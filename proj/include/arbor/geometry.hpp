// Integer-grid point sets for the geometric view of binary search trees.
//
// Keys run left to right along x, time runs top to bottom along y. A point
// set is arborally satisfied when every pair of points that do not share a
// row or column has a third point somewhere in the closed rectangle they span.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace arbor {

/// Malformed user input (bad permutation file, k < 2, n over a limit, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A query about an object that is not part of the structure it was asked of.
struct QueryError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// A structural property that must hold was found broken.
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Kind : std::uint8_t { Original, Marked };

struct Point {
    int key = 0;
    int time = 0;
    Kind kind = Kind::Original;

    // Identity is the grid cell; the kind tag is provenance.
    friend bool operator==(const Point& a, const Point& b) {
        return a.key == b.key && a.time == b.time;
    }
};

inline std::string to_string(const Point& p) {
    return "(" + std::to_string(p.key) + "," + std::to_string(p.time) + ")";
}

/// Position of q as seen from p. Time grows downward, so Above means an
/// earlier time in the same column and NE means larger key, earlier time.
enum class Relation : std::uint8_t { Above, Below, Left, Right, NE, NW, SE, SW, Same };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::Above: return "Above";
        case Relation::Below: return "Below";
        case Relation::Left: return "Left";
        case Relation::Right: return "Right";
        case Relation::NE: return "NE";
        case Relation::NW: return "NW";
        case Relation::SE: return "SE";
        case Relation::SW: return "SW";
        case Relation::Same: return "Same";
    }
    return "?";
}

constexpr Relation relate(const Point& p, const Point& q) {
    if (q.key == p.key) {
        if (q.time == p.time) return Relation::Same;
        return q.time < p.time ? Relation::Above : Relation::Below;
    }
    if (q.time == p.time) return q.key < p.key ? Relation::Left : Relation::Right;
    if (q.key > p.key) return q.time < p.time ? Relation::NE : Relation::SE;
    return q.time < p.time ? Relation::NW : Relation::SW;
}

/// An access sequence: the key touched at each time 1..n, forming a
/// permutation of 1..n.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> keys) : keys_(std::move(keys)) {
        const int n = size();
        time_of_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int t = 1; t <= n; ++t) {
            const int k = keys_[static_cast<std::size_t>(t - 1)];
            if (k < 1 || k > n) {
                throw InputError("permutation entry " + std::to_string(k) + " at position " +
                                 std::to_string(t) + " is outside [1, " + std::to_string(n) + "]");
            }
            if (time_of_[static_cast<std::size_t>(k)] != 0) {
                throw InputError("key " + std::to_string(k) + " repeats in permutation");
            }
            time_of_[static_cast<std::size_t>(k)] = t;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> keys(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) keys[static_cast<std::size_t>(i)] = i + 1;
        return Permutation(std::move(keys));
    }

    /// Whitespace-separated integers, one key per time step.
    static Permutation parse(std::istream& in) {
        std::vector<int> keys;
        std::string token;
        while (in >> token) {
            std::size_t used = 0;
            long value = 0;
            try {
                value = std::stol(token, &used);
            } catch (const std::exception&) {
                throw InputError("not an integer: '" + token + "'");
            }
            if (used != token.size()) throw InputError("not an integer: '" + token + "'");
            if (value < 1 || value > 100'000'000) throw InputError("key out of range: " + token);
            keys.push_back(static_cast<int>(value));
        }
        if (keys.empty()) throw InputError("empty permutation");
        return Permutation(std::move(keys));
    }

    static Permutation parse(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    int size() const { return static_cast<int>(keys_.size()); }
    int key_at(int time) const { return keys_[static_cast<std::size_t>(time - 1)]; }
    int time_of(int key) const { return time_of_[static_cast<std::size_t>(key)]; }
    Point original_at(int time) const { return {key_at(time), time, Kind::Original}; }
    Point original_of(int key) const { return {key, time_of(key), Kind::Original}; }
    std::span<const int> keys() const { return keys_; }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(keys_[i]);
        }
        return out;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.keys_ == b.keys_; }

private:
    std::vector<int> keys_;
    std::vector<int> time_of_;
};

/// Static orthogonal range counting over grid points (merge-sort tree on
/// time, sorted keys per node). Queries are O(log^2 m).
class RectangleIndex {
public:
    RectangleIndex() = default;

    RectangleIndex(int n, std::span<const Point> points) : n_(n) {
        size_ = 1;
        while (size_ < n + 1) size_ <<= 1;
        nodes_.assign(2 * static_cast<std::size_t>(size_), {});
        for (const Point& p : points) nodes_[static_cast<std::size_t>(size_ + p.time)].push_back(p.key);
        for (int i = size_; i < 2 * size_; ++i) {
            auto& v = nodes_[static_cast<std::size_t>(i)];
            std::sort(v.begin(), v.end());
        }
        for (int i = size_ - 1; i >= 1; --i) {
            const auto& l = nodes_[static_cast<std::size_t>(2 * i)];
            const auto& r = nodes_[static_cast<std::size_t>(2 * i + 1)];
            auto& out = nodes_[static_cast<std::size_t>(i)];
            out.resize(l.size() + r.size());
            std::merge(l.begin(), l.end(), r.begin(), r.end(), out.begin());
        }
    }

    /// Number of points with key in [key_lo, key_hi] and time in [time_lo, time_hi].
    std::size_t count(int key_lo, int key_hi, int time_lo, int time_hi) const {
        if (key_lo > key_hi || time_lo > time_hi || nodes_.empty()) return 0;
        time_lo = std::max(time_lo, 0);
        time_hi = std::min(time_hi, n_);
        if (time_lo > time_hi) return 0;
        std::size_t total = 0;
        int lo = time_lo + size_;
        int hi = time_hi + size_ + 1;
        while (lo < hi) {
            if (lo & 1) total += count_in(nodes_[static_cast<std::size_t>(lo++)], key_lo, key_hi);
            if (hi & 1) total += count_in(nodes_[static_cast<std::size_t>(--hi)], key_lo, key_hi);
            lo >>= 1;
            hi >>= 1;
        }
        return total;
    }

    bool empty(int key_lo, int key_hi, int time_lo, int time_hi) const {
        return count(key_lo, key_hi, time_lo, time_hi) == 0;
    }

private:
    static std::size_t count_in(const std::vector<int>& v, int lo, int hi) {
        return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), hi) -
                                        std::lower_bound(v.begin(), v.end(), lo));
    }

    int n_ = 0;
    int size_ = 0;
    std::vector<std::vector<int>> nodes_;
};

/// Immutable set of grid points on [1, n]^2 with row and column indexes.
/// At most one original point per row and per column.
class PointSet {
public:
    PointSet() = default;

    PointSet(int n, std::vector<Point> points) : n_(n), points_(std::move(points)) {
        if (n < 0) throw InputError("negative grid size");
        rows_.assign(static_cast<std::size_t>(n) + 1, {});
        cols_.assign(static_cast<std::size_t>(n) + 1, {});
        original_time_.assign(static_cast<std::size_t>(n) + 1, 0);
        std::vector<int> original_key(static_cast<std::size_t>(n) + 1, 0);
        for (const Point& p : points_) {
            if (p.key < 1 || p.key > n || p.time < 1 || p.time > n) {
                throw InputError("point " + arbor::to_string(p) + " outside the " + std::to_string(n) +
                                 "x" + std::to_string(n) + " grid");
            }
            rows_[static_cast<std::size_t>(p.time)].push_back(p.key);
            cols_[static_cast<std::size_t>(p.key)].push_back(p.time);
            if (p.kind == Kind::Original) {
                if (original_time_[static_cast<std::size_t>(p.key)] != 0 ||
                    original_key[static_cast<std::size_t>(p.time)] != 0) {
                    throw InputError("two original points share a row or column at " + arbor::to_string(p));
                }
                original_time_[static_cast<std::size_t>(p.key)] = p.time;
                original_key[static_cast<std::size_t>(p.time)] = p.key;
            }
        }
        for (auto& r : rows_) std::sort(r.begin(), r.end());
        for (auto& c : cols_) std::sort(c.begin(), c.end());
        for (const auto& r : rows_) {
            if (std::adjacent_find(r.begin(), r.end()) != r.end()) {
                throw InputError("duplicate point in point set");
            }
        }
    }

    static PointSet from_permutation(const Permutation& perm) {
        std::vector<Point> pts;
        pts.reserve(static_cast<std::size_t>(perm.size()));
        for (int t = 1; t <= perm.size(); ++t) pts.push_back(perm.original_at(t));
        return PointSet(perm.size(), std::move(pts));
    }

    int n() const { return n_; }
    std::size_t size() const { return points_.size(); }
    std::span<const Point> points() const { return points_; }
    const std::vector<int>& row(int time) const { return rows_[static_cast<std::size_t>(time)]; }
    const std::vector<int>& column(int key) const { return cols_[static_cast<std::size_t>(key)]; }

    bool contains(int key, int time) const {
        if (key < 1 || key > n_ || time < 1 || time > n_) return false;
        const auto& r = row(time);
        return std::binary_search(r.begin(), r.end(), key);
    }
    bool contains(const Point& p) const { return contains(p.key, p.time); }

    std::optional<Point> find(int key, int time) const {
        if (!contains(key, time)) return std::nullopt;
        const bool orig = original_time_[static_cast<std::size_t>(key)] == time;
        return Point{key, time, orig ? Kind::Original : Kind::Marked};
    }

    /// Number of points in the closed rectangle with the given key and time ranges.
    std::size_t count_in(int key_lo, int key_hi, int time_lo, int time_hi) const {
        std::size_t total = 0;
        key_lo = std::max(key_lo, 1);
        key_hi = std::min(key_hi, n_);
        for (int k = key_lo; k <= key_hi; ++k) {
            const auto& c = column(k);
            total += static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), time_hi) -
                                              std::lower_bound(c.begin(), c.end(), time_lo));
        }
        return total;
    }

private:
    int n_ = 0;
    std::vector<Point> points_;
    std::vector<std::vector<int>> rows_;
    std::vector<std::vector<int>> cols_;
    std::vector<int> original_time_;
};

/// Strategy for locating a third point inside a rectangle.
enum class WitnessSearch : std::uint8_t {
    Indexed,  // column index + binary search
    Scan,     // linear pass over every point
};

inline bool rect_satisfied(const PointSet& set, const Point& p, const Point& q,
                           WitnessSearch how = WitnessSearch::Indexed) {
    if (!set.contains(p) || !set.contains(q)) {
        throw QueryError("rect_satisfied: " + to_string(p) + " or " + to_string(q) + " is not in the set");
    }
    if (p.key == q.key || p.time == q.time) return true;
    const int klo = std::min(p.key, q.key), khi = std::max(p.key, q.key);
    const int tlo = std::min(p.time, q.time), thi = std::max(p.time, q.time);
    if (how == WitnessSearch::Indexed) {
        // The two corners are themselves inside the closed rectangle.
        return set.count_in(klo, khi, tlo, thi) > 2;
    }
    for (const Point& r : set.points()) {
        if (r == p || r == q) continue;
        if (r.key >= klo && r.key <= khi && r.time >= tlo && r.time <= thi) return true;
    }
    return false;
}

struct SatisfactionReport {
    bool satisfied = true;
    std::optional<std::pair<Point, Point>> witness;  // one unsatisfied pair
};

/// Literal pairwise check over every unordered pair.
inline SatisfactionReport is_arborally_satisfied_pairwise(const PointSet& set,
                                                          WitnessSearch how = WitnessSearch::Indexed) {
    auto pts = set.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Point a = *set.find(pts[i].key, pts[i].time);
            const Point b = *set.find(pts[j].key, pts[j].time);
            if (!rect_satisfied(set, a, b, how)) {
                // Report the earlier point first.
                if (b.time < a.time || (b.time == a.time && b.key < a.key)) return {false, std::pair{b, a}};
                return {false, std::pair{a, b}};
            }
        }
    }
    return {};
}

/// Row sweep: for each point p, walk upward from p's row toward the first
/// point above p in its column, tracking the nearest key seen on each side.
/// A row whose nearest key beats the running bound spans an empty rectangle.
inline SatisfactionReport is_arborally_satisfied(const PointSet& set) {
    const int n = set.n();
    for (int t = 1; t <= n; ++t) {
        const auto& row_t = set.row(t);
        for (std::size_t idx = 0; idx < row_t.size(); ++idx) {
            const int x = row_t[idx];
            const auto& col = set.column(x);
            const auto above_it = std::lower_bound(col.begin(), col.end(), t);
            const int above = above_it == col.begin() ? 0 : *std::prev(above_it);
            const Point p = *set.find(x, t);

            int left_bound = idx > 0 ? row_t[idx - 1] : 0;
            int right_bound = idx + 1 < row_t.size() ? row_t[idx + 1] : n + 1;
            bool left_done = left_bound == x - 1;
            bool right_done = right_bound == x + 1;
            for (int r = t - 1; r > above && !(left_done && right_done); --r) {
                const auto& row_r = set.row(r);
                if (row_r.empty()) continue;
                const auto it = std::lower_bound(row_r.begin(), row_r.end(), x);
                if (!left_done && it != row_r.begin()) {
                    const int k = *std::prev(it);
                    if (k > left_bound) return {false, std::pair{*set.find(k, r), p}};
                }
                if (!right_done && it != row_r.end()) {
                    const int k = *it;  // k != x because r > above
                    if (k < right_bound) return {false, std::pair{*set.find(k, r), p}};
                }
                if (it != row_r.begin()) left_bound = std::max(left_bound, *std::prev(it));
                if (it != row_r.end()) right_bound = std::min(right_bound, *it);
                left_done = left_bound == x - 1;
                right_done = right_bound == x + 1;
            }
        }
    }
    return {};
}

}  // namespace arbor
