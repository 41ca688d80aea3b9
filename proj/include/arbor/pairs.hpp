// Pairs of originals assigned to marked points, and their taxonomy.

#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "check.hpp"
#include "decomposition.hpp"
#include "greedy.hpp"

namespace arbor {

enum class Side : std::uint8_t { L, R };
enum class PairClass : std::uint8_t { Zig, Zag };
enum class Goodness : std::uint8_t { Good, Bad, NotApplicable };
enum class Orientation : std::uint8_t { Slash, Backslash, None };

inline const char* to_string(Side s) { return s == Side::L ? "L" : "R"; }
inline const char* to_string(PairClass c) { return c == PairClass::Zig ? "Zig" : "Zag"; }
inline const char* to_string(Goodness g) {
    switch (g) {
        case Goodness::Good: return "Good";
        case Goodness::Bad: return "Bad";
        default: return "NA";
    }
}
inline const char* to_string(Orientation o) {
    switch (o) {
        case Orientation::Slash: return "Slash";
        case Orientation::Backslash: return "Backslash";
        default: return "None";
    }
}

struct PairRecord {
    Point marked;
    Point p;        // OP(marked)
    Point q_above;  // first point above marked
    Point q;        // OP(q_above)
    Side side = Side::R;
    PairClass cls = PairClass::Zig;
    Goodness goodness = Goodness::NotApplicable;
    Orientation orientation = Orientation::None;
};

/// CP(marked) with its class. Throws InvariantError if the configuration is
/// neither zig nor zag.
inline PairRecord cp(const AugmentedPointSet& aug, const Point& marked_in) {
    if (!aug.is_marked(marked_in)) throw QueryError("cp: " + to_string(marked_in) + " is not a marked point");
    PairRecord rec;
    rec.marked = {marked_in.key, marked_in.time, Kind::Marked};
    rec.p = aug.op(rec.marked);
    rec.q_above = aug.first_above(rec.marked);
    rec.q = aug.op(rec.q_above);
    rec.side = rec.marked.key > rec.p.key ? Side::R : Side::L;

    const Relation q_from_p = relate(rec.p, rec.q);
    const Relation q_from_m = relate(rec.marked, rec.q);
    const bool zig = rec.side == Side::R ? q_from_p == Relation::NW : q_from_p == Relation::NE;
    const bool zag = rec.side == Side::R ? (q_from_m == Relation::Above || q_from_m == Relation::NE)
                                         : (q_from_m == Relation::Above || q_from_m == Relation::NW);
    if (zig == zag) {
        throw InvariantError("pair of " + to_string(rec.marked) + " is " + (zig ? "both zig and zag" : "neither zig nor zag") +
                             ": p=" + to_string(rec.p) + " q=" + to_string(rec.q));
    }
    if (rec.q.time >= rec.p.time) throw InvariantError("pair of " + to_string(rec.marked) + " has q not before p");
    rec.cls = zig ? PairClass::Zig : PairClass::Zag;
    if (zag) {
        const int klo = std::min(rec.p.key, rec.q.key), khi = std::max(rec.p.key, rec.q.key);
        const bool empty = aug.original_index().empty(klo + 1, khi - 1, rec.q.time + 1, rec.p.time - 1);
        rec.goodness = empty ? Goodness::Good : Goodness::Bad;
        rec.orientation = relate(rec.p, rec.q) == Relation::NE ? Orientation::Slash : Orientation::Backslash;
    }
    return rec;
}

enum class AmcKind : std::uint8_t { Mapped, Observable };

struct AmcResult {
    AmcKind kind = AmcKind::Observable;
    Point target;              // valid when Mapped
    bool s1_prime_original = false;
};

/// The partial map from bad-pair points to zig points. Side R walks to the
/// next point right on the row, then to the first point above that.
inline AmcResult amc_map(const AugmentedPointSet& aug, const Point& marked) {
    const PairRecord rec = cp(aug, marked);
    if (rec.cls != PairClass::Zag || rec.goodness != Goodness::Bad) {
        throw QueryError("amc_map: " + to_string(marked) + " does not have a bad pair");
    }
    const auto next = rec.side == Side::R ? aug.point_right(rec.marked) : aug.point_left(rec.marked);
    if (!next) throw InvariantError("bad pair at " + to_string(marked) + " has no neighbour on its outer side");
    if (aug.is_original(*next)) {
        throw InvariantError("neighbour of bad-pair point " + to_string(marked) + " is original");
    }
    if (cp(aug, *next).cls == PairClass::Zig) return {AmcKind::Mapped, *next, false};
    const Point s1 = aug.first_above(*next);
    if (aug.is_marked(s1) && cp(aug, s1).cls == PairClass::Zig) return {AmcKind::Mapped, s1, false};
    return {AmcKind::Observable, {}, aug.is_original(s1)};
}

struct Tally {
    std::size_t g_total = 0;
    std::size_t cp_distinct = 0;   // |CP(G)| as a set of pairs
    std::size_t mmc = 0, mfc = 0;  // marked points per class
    std::size_t mmc_pairs = 0, mfc_pairs = 0;
    std::size_t zig_zag_overlap = 0;  // pairs that are zig for one mark and zag for another
    std::size_t gr = 0, br = 0;
    std::size_t observable = 0;
    std::size_t mapped = 0;
    std::size_t s1_prime_original = 0;
    std::size_t max_preimages = 0;

    // Indexed by the time of p (the original on the marked point's row).
    std::vector<int> rmmc, lmmc, rmfc_bad, lmfc_bad, obs_r, obs_l;

    int max_mmc_per_point() const {
        int m = 0;
        for (std::size_t i = 0; i < rmmc.size(); ++i) m = std::max({m, rmmc[i], lmmc[i]});
        return m;
    }
    int max_observable_per_side() const {
        int m = 0;
        for (std::size_t i = 0; i < obs_r.size(); ++i) m = std::max({m, obs_r[i], obs_l[i]});
        return m;
    }
    int max_observable_per_point() const {
        int m = 0;
        for (std::size_t i = 0; i < obs_r.size(); ++i) m = std::max(m, obs_r[i] + obs_l[i]);
        return m;
    }
};

struct Classification {
    std::vector<PairRecord> records;  // same order as aug.marked()
    std::vector<AmcResult> amc;       // parallel to records; Observable with no meaning unless Bad
    Tally tally;
    CheckOutcome checks;              // unique-coupling, cardinality identities, preimages, p2exists
};

inline Classification classify_all(const AugmentedPointSet& aug) {
    Classification out;
    const int n = aug.n();
    Tally& t = out.tally;
    for (auto* v : {&t.rmmc, &t.lmmc, &t.rmfc_bad, &t.lmfc_bad, &t.obs_r, &t.obs_l}) {
        v->assign(static_cast<std::size_t>(n) + 1, 0);
    }
    t.g_total = aug.marked_count();
    out.records.reserve(t.g_total);
    out.amc.resize(t.g_total);

    std::set<std::pair<int, int>> all_pairs, zig_pairs, zag_pairs;
    std::set<std::pair<int, int>> right_pairs, left_pairs;
    std::map<std::pair<int, int>, int> pre_r, pre_l;  // target cell -> preimage count

    for (std::size_t i = 0; i < aug.marked().size(); ++i) {
        const PairRecord rec = cp(aug, aug.marked()[i]);
        out.records.push_back(rec);
        const std::pair<int, int> key{rec.p.time, rec.q.time};
        all_pairs.insert(key);
        auto& side_set = rec.side == Side::R ? right_pairs : left_pairs;
        out.checks.note("unique-coupling");
        if (!side_set.insert(key).second) {
            out.checks.fail("unique-coupling", "two " + std::string(to_string(rec.side)) + " points share pair p=" +
                                                   to_string(rec.p) + " q=" + to_string(rec.q));
        }
        const auto pt = static_cast<std::size_t>(rec.p.time);
        if (rec.cls == PairClass::Zig) {
            ++t.mmc;
            zig_pairs.insert(key);
            ++(rec.side == Side::R ? t.rmmc : t.lmmc)[pt];
            continue;
        }
        ++t.mfc;
        zag_pairs.insert(key);
        if (rec.goodness == Goodness::Good) {
            ++t.gr;
            continue;
        }
        ++t.br;
        ++(rec.side == Side::R ? t.rmfc_bad : t.lmfc_bad)[pt];

        // The neighbour must sit strictly between the marked point and the
        // nearest interior original.
        const auto next = rec.side == Side::R ? aug.point_right(rec.marked) : aug.point_left(rec.marked);
        out.checks.note("p2exists");
        if (next) {
            int nearest = rec.side == Side::R ? n + 1 : 0;
            for (int tt = rec.q.time + 1; tt < rec.p.time; ++tt) {
                const int k = aug.permutation().key_at(tt);
                if (rec.side == Side::R && k > rec.p.key && k < rec.q.key) nearest = std::min(nearest, k);
                if (rec.side == Side::L && k < rec.p.key && k > rec.q.key) nearest = std::max(nearest, k);
            }
            const bool inside = rec.side == Side::R ? next->key < nearest : next->key > nearest;
            if (!inside) {
                out.checks.fail("p2exists", "neighbour " + to_string(*next) + " of " + to_string(rec.marked) +
                                                " is not inside the rectangle to the nearest original");
            }
        }
        const AmcResult amc = amc_map(aug, rec.marked);
        out.amc[i] = amc;
        if (amc.kind == AmcKind::Mapped) {
            ++t.mapped;
            auto& pre = rec.side == Side::R ? pre_r : pre_l;
            const int c = ++pre[{amc.target.key, amc.target.time}];
            t.max_preimages = std::max(t.max_preimages, static_cast<std::size_t>(c));
        } else {
            ++t.observable;
            ++(rec.side == Side::R ? t.obs_r : t.obs_l)[pt];
            if (amc.s1_prime_original) ++t.s1_prime_original;
        }
    }
    t.cp_distinct = all_pairs.size();
    t.mmc_pairs = zig_pairs.size();
    t.mfc_pairs = zag_pairs.size();

    // A pair can be zig for a right-side mark and zag for a left-side mark on
    // the same row, so the two pair sets may overlap; only the union bound
    // holds. The overlap is kept as a statistic.
    t.zig_zag_overlap = t.mmc_pairs + t.mfc_pairs - t.cp_distinct;
    out.checks.note("pair-cardinality");
    if (t.mmc + t.mfc != t.g_total || t.cp_distinct > t.mmc_pairs + t.mfc_pairs) {
        out.checks.fail("pair-cardinality", "classes do not cover CP: " + std::to_string(t.mmc_pairs) + " + " +
                                                std::to_string(t.mfc_pairs) + " vs " + std::to_string(t.cp_distinct));
    }
    if (t.g_total > 2 * t.cp_distinct) {
        out.checks.fail("coupling-size", "|G| = " + std::to_string(t.g_total) + " exceeds 2|CP(G)| = " +
                                             std::to_string(2 * t.cp_distinct));
    }
    out.checks.note("amc-preimages");
    if (t.max_preimages > 2) {
        out.checks.fail("amc-preimages", "a zig point receives " + std::to_string(t.max_preimages) + " bad-pair points");
    }
    out.checks.note("br-split");
    if (t.br != t.mapped + t.observable || t.mapped > 4 * t.mmc) {
        out.checks.fail("br-split", "|BR| = " + std::to_string(t.br) + ", mapped " + std::to_string(t.mapped) +
                                        ", observable " + std::to_string(t.observable) + ", |MMC| " +
                                        std::to_string(t.mmc));
    }
    return out;
}

/// Same as classify_all(aug) after checking the tree belongs to the permutation.
inline Classification classify_all(const AugmentedPointSet& aug, const DecompositionTree& tree) {
    if (!validate_tree(aug.permutation(), tree)) throw InputError("decomposition tree does not match the permutation");
    return classify_all(aug);
}

/// Per original p with B = RT(p): the q of every pair lies in a sibling of B,
/// and for each side the zig pairs (and separately the observable bad pairs)
/// land in pairwise distinct siblings.
inline CheckOutcome check_sibling_distinctness(const AugmentedPointSet& aug, const DecompositionTree& tree,
                                               const Classification& cls) {
    CheckOutcome out;
    const int n = aug.n();
    // (time of p, family) -> sibling ids seen
    std::vector<std::array<std::vector<int>, 4>> seen(static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 0; i < cls.records.size(); ++i) {
        const PairRecord& rec = cls.records[i];
        const int b = tree.rt(rec.p.time);
        const int parent = tree.node(b).parent;
        out.note("reversetop");
        out.note("notoutsideblock");
        if (parent < 0) {
            out.fail("reversetop", "marked point " + to_string(rec.marked) + " on the row of the root's top", b);
            continue;
        }
        const int sib = tree.child_containing(parent, rec.q.time);
        if (sib < 0) {
            out.fail("notoutsideblock", "q=" + to_string(rec.q) + " of " + to_string(rec.marked) +
                                            " lies outside the parent of RT(p)", b);
            continue;
        }
        if (sib == b) {
            out.fail("reversetop", "q=" + to_string(rec.q) + " of " + to_string(rec.marked) + " lies inside RT(p)", b);
            continue;
        }
        int family = -1;
        if (rec.cls == PairClass::Zig) family = rec.side == Side::R ? 0 : 1;
        else if (rec.goodness == Goodness::Bad && cls.amc[i].kind == AmcKind::Observable) family = rec.side == Side::R ? 2 : 3;
        if (family < 0) continue;
        auto& list = seen[static_cast<std::size_t>(rec.p.time)][static_cast<std::size_t>(family)];
        const char* name = family < 2 ? "finalmmc" : "finalmfc";
        out.note(name);
        if (std::find(list.begin(), list.end(), sib) != list.end()) {
            out.fail(name, "two pairs of p=" + to_string(rec.p) + " share sibling block " + std::to_string(sib), b);
        }
        list.push_back(sib);
    }
    return out;
}

inline void write_pairs_csv(std::ostream& os, const std::vector<PairRecord>& records) {
    os << "marked_key,marked_time,p_key,p_time,q_key,q_time,side,class,goodness,orientation\n";
    for (const auto& r : records) {
        os << r.marked.key << ',' << r.marked.time << ',' << r.p.key << ',' << r.p.time << ',' << r.q.key << ','
           << r.q.time << ',' << to_string(r.side) << ',' << to_string(r.cls) << ',' << to_string(r.goodness) << ','
           << to_string(r.orientation) << '\n';
    }
}

}  // namespace arbor
