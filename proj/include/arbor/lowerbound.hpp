// Good rectangles as a lower-bound certificate, plus exact OPT for tiny inputs.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "check.hpp"
#include "greedy.hpp"
#include "pairs.hpp"

namespace arbor {

/// A good pair: p is the later original, q the earlier one, `marked` the
/// point whose pair it is.
struct GoodRect {
    Point p;
    Point q;
    Point marked;
};

struct RectFamily {
    Orientation orientation = Orientation::Backslash;
    std::vector<GoodRect> rects;
};

struct Families {
    RectFamily backslash{Orientation::Backslash, {}};
    RectFamily slash{Orientation::Slash, {}};
};

inline bool open_interior_contains(const GoodRect& r, const Point& x) {
    const int klo = std::min(r.p.key, r.q.key), khi = std::max(r.p.key, r.q.key);
    return x.key > klo && x.key < khi && x.time > r.q.time && x.time < r.p.time;
}

/// Split good pairs by orientation. Interiors are re-checked against every
/// point of X and G.
inline Families good_rectangles(const AugmentedPointSet& aug, const std::vector<PairRecord>& records) {
    Families out;
    for (const auto& rec : records) {
        if (rec.cls != PairClass::Zag || rec.goodness != Goodness::Good) continue;
        const int klo = std::min(rec.p.key, rec.q.key), khi = std::max(rec.p.key, rec.q.key);
        if (!aug.index().empty(klo + 1, khi - 1, rec.q.time + 1, rec.p.time - 1)) {
            throw InvariantError("good pair p=" + to_string(rec.p) + " q=" + to_string(rec.q) +
                                 " has a point in its interior");
        }
        auto& fam = rec.orientation == Orientation::Slash ? out.slash : out.backslash;
        fam.rects.push_back({rec.p, rec.q, rec.marked});
    }
    return out;
}

namespace detail {

inline Point mirror(const Point& x, int n) { return {n + 1 - x.key, x.time, x.kind}; }

inline RectFamily mirrored(const RectFamily& fam, int n) {
    RectFamily out{fam.orientation == Orientation::Slash ? Orientation::Backslash : Orientation::Slash, {}};
    for (const auto& r : fam.rects) out.rects.push_back({mirror(r.p, n), mirror(r.q, n), mirror(r.marked, n)});
    return out;
}

inline PointSet mirrored(const PointSet& set) {
    std::vector<Point> pts;
    for (const auto& x : set.points()) pts.push_back(mirror(x, set.n()));
    return PointSet(set.n(), std::move(pts));
}

}  // namespace detail

/// Pairwise constraints on how good rectangles of one orientation overlap.
/// Runs on the backslash form; slash families are mirrored first.
inline CheckOutcome check_interactions(const RectFamily& family_in, int n) {
    const RectFamily family =
        family_in.orientation == Orientation::Slash ? detail::mirrored(family_in, n) : family_in;
    CheckOutcome out;
    const auto& rects = family.rects;

    // Shared bottom corner: the wider rectangle's marked point may not sit
    // strictly between the narrower one's left edge and the corner.
    std::unordered_map<int, std::vector<std::size_t>> by_p, by_q;
    for (std::size_t i = 0; i < rects.size(); ++i) {
        by_p[rects[i].p.time].push_back(i);
        by_q[rects[i].q.time].push_back(i);
    }
    for (const auto& [t, group] : by_p) {
        for (std::size_t wi : group) {
            for (std::size_t ni : group) {
                const GoodRect& wide = rects[wi];
                const GoodRect& narrow = rects[ni];
                if (wi == ni || relate(wide.q, narrow.q) != Relation::NE) continue;
                out.note("interthree");
                if (wide.marked.key > narrow.q.key && wide.marked.key < wide.p.key) {
                    out.fail("interthree", "marked " + to_string(wide.marked) + " inside the row of rectangle " +
                                               to_string(narrow.q) + "-" + to_string(narrow.p));
                }
            }
        }
    }
    // Shared top corner s: for r SW of q, the marked point of the rectangle
    // ending at q avoids the other interior and the bottom-left corner.
    for (const auto& [t, group] : by_q) {
        for (std::size_t qi : group) {
            for (std::size_t ri : group) {
                const GoodRect& rq = rects[qi];
                const GoodRect& rr = rects[ri];
                if (qi == ri || relate(rq.p, rr.p) != Relation::SW) continue;
                out.note("interfour");
                const int k = rq.marked.key;
                if ((k > rq.q.key && k < rr.p.key) || k == rq.q.key) {
                    out.fail("interfour", "marked " + to_string(rq.marked) + " of " + to_string(rq.q) + "-" +
                                              to_string(rq.p) + " against " + to_string(rr.q) + "-" + to_string(rr.p));
                }
            }
        }
    }
    // No marked point of one rectangle in the interior of another.
    std::vector<Point> markers;
    for (const auto& r : rects) markers.push_back(r.marked);
    const RectangleIndex idx(n, markers);
    for (const auto& r : rects) {
        out.note("interone-intertwo");
        if (!idx.empty(r.q.key + 1, r.p.key - 1, r.q.time + 1, r.p.time - 1)) {
            out.fail("interone-intertwo", "a marked point lies inside " + to_string(r.q) + "-" + to_string(r.p));
        }
    }
    return out;
}

struct Marking {
    GoodRect rect;
    int line_x2 = 0;  // twice the x-coordinate of the separating line
    Point a, b;       // a left of the line, b right
};

struct Certificate {
    Orientation orientation = Orientation::Backslash;
    std::vector<Marking> markings;
};

/// Repeatedly take the rightmost corner, its widest rectangle, a vertical line
/// through it that avoids every other remaining rectangle, and the adjacent
/// pair the line separates. Throws InvariantError if any step is impossible.
inline Certificate extract_certificate(const RectFamily& family_in, const PointSet& superset) {
    const int n = superset.n();
    const bool flip = family_in.orientation == Orientation::Slash;
    const RectFamily family = flip ? detail::mirrored(family_in, n) : family_in;
    const PointSet set = flip ? detail::mirrored(superset) : superset;

    Certificate cert{family_in.orientation, {}};
    std::vector<GoodRect> remaining = family.rects;
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> used;
    while (!remaining.empty()) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i) {
            const auto& a = remaining[i];
            const auto& b = remaining[pick];
            if (a.p.key > b.p.key || (a.p.key == b.p.key && a.q.key < b.q.key)) pick = i;
            else if (a.p.key == b.p.key && a.q.key == b.q.key) {
                throw InvariantError("two rectangles share both corners " + to_string(a.q) + "-" + to_string(a.p));
            }
        }
        const GoodRect rect = remaining[pick];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));

        std::optional<int> line;
        for (int x2 = 2 * rect.q.key + 1; x2 < 2 * rect.p.key && !line; x2 += 2) {
            bool crossed = false;
            for (const auto& o : remaining) {
                if (2 * o.q.key < x2 && x2 < 2 * o.p.key && o.q.time < rect.p.time && o.p.time > rect.q.time) {
                    crossed = true;
                    break;
                }
            }
            if (!crossed) line = x2;
        }
        if (!line) {
            throw InvariantError("no separating line through " + to_string(rect.q) + "-" + to_string(rect.p));
        }
        std::optional<Marking> mark;
        for (int t = rect.q.time; t <= rect.p.time && !mark; ++t) {
            const auto& row = set.row(t);
            auto it = std::lower_bound(row.begin(), row.end(), (*line + 1) / 2);
            if (it == row.begin() || it == row.end()) continue;
            const int kb = *it, ka = *std::prev(it);
            if (ka < rect.q.key || kb > rect.p.key) continue;
            mark = Marking{rect, *line, *set.find(ka, t), *set.find(kb, t)};
        }
        if (!mark) {
            throw InvariantError("no adjacent pair across the line in " + to_string(rect.q) + "-" + to_string(rect.p) +
                                 "; superset is not satisfied");
        }
        const auto id = std::pair{std::pair{mark->a.key, mark->a.time}, std::pair{mark->b.key, mark->b.time}};
        if (!used.insert(id).second) {
            throw InvariantError("adjacent pair " + to_string(mark->a) + "," + to_string(mark->b) + " marked twice");
        }
        if (mark->a.kind == Kind::Original && mark->b.kind == Kind::Original) {
            throw InvariantError("both points of a marking are original");
        }
        if (flip) {
            mark->rect = {detail::mirror(rect.p, n), detail::mirror(rect.q, n), detail::mirror(rect.marked, n)};
            mark->line_x2 = 2 * (n + 1) - mark->line_x2;
            const Point a = detail::mirror(mark->b, n), b = detail::mirror(mark->a, n);
            mark->a = a;
            mark->b = b;
        }
        cert.markings.push_back(*mark);
    }
    return cert;
}

inline void write_certificate_csv(std::ostream& os, const std::vector<Certificate>& certs) {
    os << "orientation,rect_p_key,rect_p_time,rect_q_key,rect_q_time,line_x2,a_key,a_time,b_key,b_time\n";
    for (const auto& c : certs) {
        for (const auto& m : c.markings) {
            os << to_string(c.orientation) << ',' << m.rect.p.key << ',' << m.rect.p.time << ',' << m.rect.q.key
               << ',' << m.rect.q.time << ',' << m.line_x2 << ',' << m.a.key << ',' << m.a.time << ',' << m.b.key
               << ',' << m.b.time << '\n';
        }
    }
}

/// A rectangle given by two originals.
using OriginalPair = std::pair<Point, Point>;

/// Every rectangle is unsatisfied by X alone, none repeats, and no corner of
/// one lies strictly inside another.
inline bool check_independent(const PointSet& x, const std::vector<OriginalPair>& rects) {
    auto strictly_inside = [](const OriginalPair& r, const Point& c) {
        const int klo = std::min(r.first.key, r.second.key), khi = std::max(r.first.key, r.second.key);
        const int tlo = std::min(r.first.time, r.second.time), thi = std::max(r.first.time, r.second.time);
        return c.key > klo && c.key < khi && c.time > tlo && c.time < thi;
    };
    auto same = [](const OriginalPair& a, const OriginalPair& b) {
        return (a.first == b.first && a.second == b.second) || (a.first == b.second && a.second == b.first);
    };
    for (std::size_t i = 0; i < rects.size(); ++i) {
        const auto& r = rects[i];
        if (!x.contains(r.first) || !x.contains(r.second)) return false;
        if (rect_satisfied(x, r.first, r.second)) return false;
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = rects[j];
            if (same(r, o)) return false;
            if (strictly_inside(r, o.first) || strictly_inside(r, o.second) || strictly_inside(o, r.first) ||
                strictly_inside(o, r.second)) {
                return false;
            }
        }
    }
    return true;
}

/// Largest independent set among the unsatisfied rectangles of X, by
/// exhaustive search.
inline std::vector<OriginalPair> max_independent_set(const Permutation& perm) {
    const PointSet x = PointSet::from_permutation(perm);
    std::vector<OriginalPair> cand;
    for (int a = 1; a <= perm.size(); ++a)
        for (int b = a + 1; b <= perm.size(); ++b) {
            const Point pa = perm.original_at(a), pb = perm.original_at(b);
            if (!rect_satisfied(x, pa, pb)) cand.emplace_back(pa, pb);
        }
    if (cand.size() > 24) throw InputError("too many rectangles for exhaustive independent-set search");
    const std::size_t m = cand.size();
    std::vector<std::uint32_t> compatible(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && check_independent(x, {cand[i], cand[j]})) compatible[i] |= 1u << j;
    std::uint32_t best = 0;
    int best_size = 0;
    // Branch and bound over candidates in order.
    auto search = [&](auto&& self, std::size_t i, std::uint32_t chosen, std::uint32_t allowed, int size) -> void {
        if (size > best_size) {
            best_size = size;
            best = chosen;
        }
        if (i == m) return;
        if (size + std::popcount(allowed >> i) <= best_size) return;
        if (allowed & (1u << i)) self(self, i + 1, chosen | (1u << i), allowed & compatible[i], size + 1);
        self(self, i + 1, chosen, allowed, size);
    };
    search(search, 0, 0u, m == 32 ? ~0u : ((1u << m) - 1), 0);
    std::vector<OriginalPair> out;
    for (std::size_t i = 0; i < m; ++i)
        if (best & (1u << i)) out.push_back(cand[i]);
    return out;
}

struct OptResult {
    std::vector<Point> added;
    PointSet superset;
    std::size_t size() const { return added.size(); }
};

/// Minimum set of added grid cells making X satisfied, by iterative deepening
/// with a transposition table. Cells are restricted to the n x n grid.
inline OptResult brute_force_opt(const Permutation& perm, std::optional<std::size_t> size_cap = std::nullopt,
                                 int max_n = 6) {
    const int n = perm.size();
    if (n > max_n || n > 8) {
        throw InputError("brute_force_opt: n = " + std::to_string(n) + " exceeds the limit of " +
                         std::to_string(std::min(max_n, 8)));
    }
    const std::size_t cap = size_cap.value_or(greedy_sweep(perm).marked_count());
    const int cells = n * n;
    auto cell = [n](int key, int time) { return (time - 1) * n + (key - 1); };
    using Mask = std::uint64_t;
    // rect[a*cells+b]: closed rectangle between cells a and b without its corners.
    std::vector<Mask> rect(static_cast<std::size_t>(cells * cells), 0);
    for (int a = 0; a < cells; ++a)
        for (int b = 0; b < cells; ++b) {
            const int ak = a % n, at = a / n, bk = b % n, bt = b / n;
            Mask m = 0;
            for (int k = std::min(ak, bk); k <= std::max(ak, bk); ++k)
                for (int t = std::min(at, bt); t <= std::max(at, bt); ++t) m |= Mask{1} << (t * n + k);
            m &= ~(Mask{1} << a);
            m &= ~(Mask{1} << b);
            rect[static_cast<std::size_t>(a * cells + b)] = m;
        }
    Mask base = 0;
    for (int t = 1; t <= n; ++t) base |= Mask{1} << cell(perm.key_at(t), t);

    // Smallest unsatisfied rectangle's free cells, or 0 when satisfied.
    auto branch_cells = [&](Mask set) -> std::optional<Mask> {
        std::optional<Mask> best;
        int best_count = 1 << 30;
        for (Mask s = set; s; s &= s - 1) {
            const int a = std::countr_zero(s);
            for (Mask u = s & (s - 1); u; u &= u - 1) {
                const int b = std::countr_zero(u);
                if (a % n == b % n || a / n == b / n) continue;
                const Mask r = rect[static_cast<std::size_t>(a * cells + b)];
                if (r & set) continue;
                const int c = std::popcount(r);
                if (c < best_count) {
                    best_count = c;
                    best = r;
                }
            }
        }
        return best;
    };

    std::unordered_map<Mask, int> failed;  // set -> largest budget known to fail
    Mask found = 0;
    auto dfs = [&](auto&& self, Mask set, int budget) -> bool {
        const auto need = branch_cells(set);
        if (!need) {
            found = set;
            return true;
        }
        if (budget == 0) return false;
        auto it = failed.find(set);
        if (it != failed.end() && it->second >= budget) return false;
        for (Mask c = *need; c; c &= c - 1) {
            if (self(self, set | (c & -c), budget - 1)) return true;
        }
        failed[set] = std::max(budget, it == failed.end() ? 0 : it->second);
        return false;
    };
    for (std::size_t depth = 0; depth <= cap; ++depth) {
        if (dfs(dfs, base, static_cast<int>(depth))) {
            OptResult res;
            std::vector<Point> all;
            for (Mask s = found; s; s &= s - 1) {
                const int c = std::countr_zero(s);
                const Point pt{c % n + 1, c / n + 1, Kind::Marked};
                if (base & (Mask{1} << c)) all.push_back({pt.key, pt.time, Kind::Original});
                else {
                    all.push_back(pt);
                    res.added.push_back(pt);
                }
            }
            res.superset = PointSet(n, std::move(all));
            return res;
        }
    }
    throw InvariantError("no satisfying superset within " + std::to_string(cap) + " added points");
}

struct GoodboundReport {
    std::size_t n = 0;
    std::size_t gr = 0;
    std::size_t opt = 0;
    // |GR|/2 + |X| <= |X u OPT|, compared doubled to stay in integers.
    bool claim_holds = false;
};

inline GoodboundReport verify_goodbound(const Permutation& perm) {
    const auto aug = greedy_sweep(perm);
    const auto cls = classify_all(aug);
    const auto opt = brute_force_opt(perm);
    GoodboundReport r;
    r.n = static_cast<std::size_t>(perm.size());
    r.gr = cls.tally.gr;
    r.opt = opt.size();
    r.claim_holds = r.gr + 2 * r.n <= 2 * (r.n + r.opt);
    return r;
}

}  // namespace arbor
