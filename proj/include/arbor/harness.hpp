// End-to-end runs: sweep, classify, check, evaluate bounds; and the
// experiment grid that turns many runs into one CSV.

#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockstats.hpp"
#include "decomposition.hpp"
#include "greedy.hpp"
#include "lowerbound.hpp"
#include "pairs.hpp"

namespace arbor {

/// c * n * lg k. Exact (integral) when k is a power of two.
struct LogBound {
    long long coeff = 0;  // c * n
    int k = 2;

    bool exact() const { return std::has_single_bit(static_cast<unsigned>(k)); }
    double value() const {
        return exact() ? static_cast<double>(coeff * std::countr_zero(static_cast<unsigned>(k)))
                       : static_cast<double>(coeff) * std::log2(static_cast<double>(k));
    }
    // lhs <= c n lg k
    bool admits(long long lhs) const {
        if (exact()) return lhs <= coeff * std::countr_zero(static_cast<unsigned>(k));
        return static_cast<long double>(lhs) <= static_cast<long double>(coeff) * std::log2l(static_cast<long double>(k));
    }
};

inline std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

struct BoundEval {
    std::string name;
    long long lhs = 0;
    double rhs = 0;
    bool pass = false;
};

struct RunOptions {
    bool invariants = true;    // greedy invariants, satisfaction, classification checks
    bool block_lemmas = true;  // blockstats and sibling distinctness (need a tree)
    bool good_rects = true;    // good rectangles, interactions, certificate against X u G
};

struct RunReport {
    int n = 0;
    int k = 2;
    std::string k_source = "witness";
    std::uint64_t seed = 0;
    std::size_t g_total = 0, mmc = 0, mfc = 0, gr = 0, br = 0, observable = 0, mapped = 0;
    std::size_t mmc_pairs = 0, mfc_pairs = 0, cp_distinct = 0, zig_zag_overlap = 0;
    int max_rmmc_p = 0;
    int max_observable_p = 0;
    int max_observable_side = 0;
    std::size_t max_preimages = 0;
    std::vector<BoundEval> bounds;
    std::vector<BoundEval> chain;  // relaxed main inequality, one entry per link
    CheckOutcome checks;
    bool all_pass = false;

    const BoundEval& bound(const std::string& name) const {
        for (const auto& b : bounds)
            if (b.name == name) return b;
        throw QueryError("no bound named " + name);
    }

    nlohmann::json to_json() const {
        auto evals = [](const std::vector<BoundEval>& v) {
            nlohmann::json a = nlohmann::json::array();
            for (const auto& b : v) a.push_back({{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"pass", b.pass}});
            return a;
        };
        nlohmann::json checks_json = nlohmann::json::object();
        for (const auto& [name, count] : checks.evaluated) checks_json[name] = {{"evaluated", count}, {"violations", 0}};
        for (const auto& v : checks.violations) checks_json[v.check]["violations"] = checks_json[v.check]["violations"].get<int>() + 1;
        nlohmann::json viol = nlohmann::json::array();
        for (std::size_t i = 0; i < checks.violations.size() && i < 50; ++i) {
            const auto& v = checks.violations[i];
            nlohmann::json e{{"check", v.check}, {"detail", v.detail}};
            if (v.block) e["block"] = *v.block;
            if (v.window) e["window"] = {v.window->first, v.window->second};
            viol.push_back(std::move(e));
        }
        return {{"n", n},
                {"k", k},
                {"k_source", k_source},
                {"log_base", 2},
                {"seed", seed},
                {"g_total", g_total},
                {"mmc", mmc},
                {"mfc", mfc},
                {"gr", gr},
                {"br", br},
                {"observable", observable},
                {"mapped", mapped},
                {"mmc_pairs", mmc_pairs},
                {"mfc_pairs", mfc_pairs},
                {"cp_distinct", cp_distinct},
                {"zig_zag_overlap", zig_zag_overlap},
                {"max_rmmc_p", max_rmmc_p},
                {"max_observable_p", max_observable_p},
                {"max_observable_side", max_observable_side},
                {"max_preimages", max_preimages},
                {"bounds", evals(bounds)},
                {"chain", evals(chain)},
                {"checks", checks_json},
                {"violations", viol},
                {"all_pass", all_pass}};
    }
};

namespace detail {

inline BoundEval linear(const std::string& name, long long lhs, long long rhs) { return {name, lhs, static_cast<double>(rhs), lhs <= rhs}; }

inline BoundEval logb(const std::string& name, long long lhs, long long coeff, int k) {
    const LogBound b{coeff, k};
    return {name, lhs, b.value(), b.admits(lhs)};
}

}  // namespace detail

/// Bounds and chain links from the counters alone.
inline void evaluate_bounds(RunReport& r) {
    const long long n = r.n;
    const int k = r.k;
    const auto mmc = static_cast<long long>(r.mmc), br = static_cast<long long>(r.br), gr = static_cast<long long>(r.gr);
    const auto g = static_cast<long long>(r.g_total);
    r.bounds = {
        detail::linear("mmc_2nk1", mmc, 2 * n * (k - 1)),
        detail::logb("mmc_14nlgk", mmc, 14 * n, k),
        detail::linear("br_10nk1", br, 10 * n * (k - 1)),
        detail::logb("br_80nlgk", br, 80 * n, k),
        detail::logb("observable_16nlgk", static_cast<long long>(r.observable), 16 * n, k),
        detail::linear("rmmc_per_point", r.max_rmmc_p, k - 1),
        detail::linear("observable_per_side", r.max_observable_side, k - 1),
        detail::linear("observable_per_point", r.max_observable_p, 2LL * (k - 1)),
        detail::linear("amc_preimages", static_cast<long long>(r.max_preimages), 2),
        detail::linear("mapped_4mmc", static_cast<long long>(r.mapped), 4 * mmc),
        detail::linear("br_4mmc_observable", br, 4 * mmc + static_cast<long long>(r.observable)),
    };
    // 4(|GR|/2 + n) stands in for 4|X u OPT|.
    const long long relaxed = 2 * gr + 4 * n;
    r.chain = {
        detail::linear("g_le_2cp", g, 2 * static_cast<long long>(r.cp_distinct)),
        detail::linear("cp_le_mmc_mfc_pairs", static_cast<long long>(r.cp_distinct),
                       static_cast<long long>(r.mmc_pairs + r.mfc_pairs)),
        {"g_eq_mmc_br_gr", g, static_cast<double>(mmc + br + gr), g == mmc + br + gr},
        detail::logb("mmc_br_188nlgk", 2 * (mmc + br), 188 * n, k),
        detail::linear("gr_le_relaxed_opt", 2 * gr, relaxed),
        {"g_le_main_relaxed", g, LogBound{188 * n, k}.value() + static_cast<double>(relaxed),
         LogBound{188 * n, k}.admits(g - relaxed)},
    };
}

/// Everything for one instance. With no tree, one is inferred and its fanout
/// becomes k.
inline RunReport run_pipeline(const Permutation& perm, std::optional<DecompositionTree> tree = std::nullopt,
                              std::optional<int> k = std::nullopt, std::uint64_t seed = 0, RunOptions opts = {}) {
    RunReport r;
    r.n = perm.size();
    r.seed = seed;
    if (k && *k < 2) throw InputError("k must be >= 2");
    if (!tree) {
        auto inf = infer_decomposition(perm);
        tree = std::move(inf.tree);
        r.k = std::max(2, inf.k);
        r.k_source = "inferred";
    } else {
        if (!validate_tree(perm, *tree)) throw InputError("decomposition tree does not match the permutation");
        r.k = std::max(2, tree->max_fanout());
        r.k_source = "witness";
    }
    if (k) {
        if (*k < tree->max_fanout()) throw InputError("tree fanout exceeds k");
        r.k = *k;
    }

    const AugmentedPointSet aug = greedy_sweep(perm);
    const Classification cls = classify_all(aug);
    const Tally& t = cls.tally;
    r.g_total = t.g_total;
    r.mmc = t.mmc;
    r.mfc = t.mfc;
    r.gr = t.gr;
    r.br = t.br;
    r.observable = t.observable;
    r.mapped = t.mapped;
    r.mmc_pairs = t.mmc_pairs;
    r.mfc_pairs = t.mfc_pairs;
    r.cp_distinct = t.cp_distinct;
    r.zig_zag_overlap = t.zig_zag_overlap;
    r.max_rmmc_p = t.max_mmc_per_point();
    r.max_observable_p = t.max_observable_per_point();
    r.max_observable_side = t.max_observable_per_side();
    r.max_preimages = t.max_preimages;
    r.checks.merge(cls.checks);

    if (opts.invariants) {
        r.checks.merge(check_greedy_invariants(aug));
        r.checks.note("satisfaction");
        if (!is_arborally_satisfied(aug.points()).satisfied) r.checks.fail("satisfaction", "X u G is not arborally satisfied");
    }
    if (opts.block_lemmas) {
        r.checks.merge(check_sibling_distinctness(aug, *tree, cls));
        const BlockContext ctx(aug, *tree, cls);
        r.checks.merge(check_block_lemmas(ctx).outcome);
    }
    if (opts.good_rects) {
        try {
            const Families fam = good_rectangles(aug, cls.records);
            r.checks.note("property-good-rectangle", fam.backslash.rects.size() + fam.slash.rects.size());
            for (const RectFamily* f : {&fam.backslash, &fam.slash}) {
                r.checks.merge(check_interactions(*f, r.n));
                r.checks.note("certificate");
                extract_certificate(*f, aug.points());
            }
        } catch (const InvariantError& e) {
            r.checks.fail("property-good-rectangle", e.what());
        }
    }

    evaluate_bounds(r);
    r.all_pass = r.checks.ok();
    for (const auto& b : r.bounds) r.all_pass = r.all_pass && b.pass;
    for (const auto& b : r.chain) r.all_pass = r.all_pass && b.pass;
    return r;
}

// ---------------------------------------------------------------------------
// Experiment grid.

struct ExperimentSpec {
    std::vector<int> ns;
    std::vector<int> ks;
    std::vector<std::uint64_t> seeds;
    int jobs = 1;
    RunOptions opts{};
};

inline const char* experiment_csv_header() {
    return "seed,n,k,k_source,g_total,mmc,mfc,gr,br,observable,max_rmmc_p,bound_2nk1,bound_14nlgk,bound_10nk1,"
           "bound_80nlgk,bound_16nlgk,all_pass";
}

/// Reports in task order: n outermost, then k, then seed.
inline std::vector<RunReport> run_experiment(const ExperimentSpec& spec) {
    for (int k : spec.ks)
        if (k < 2) throw InputError("k must be >= 2");
    struct Task {
        int n, k;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (int n : spec.ns)
        for (int k : spec.ks)
            for (auto s : spec.seeds) tasks.push_back({n, k, s});
    std::vector<RunReport> out(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            try {
                auto inst = generate_k_decomposable(t.n, t.k, t.seed);
                out[i] = run_pipeline(inst.perm, std::move(inst.tree), t.k, t.seed, spec.opts);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i].empty()) {
            throw InvariantError("n=" + std::to_string(tasks[i].n) + " k=" + std::to_string(tasks[i].k) +
                                 " seed=" + std::to_string(tasks[i].seed) + ": " + errors[i]);
        }
    }
    return out;
}

/// One row per report, then a mean row per (n,k) group in first-seen order.
inline void write_experiment_csv(std::ostream& os, const std::vector<RunReport>& reports) {
    os << experiment_csv_header() << '\n';
    auto rhs = [](const RunReport& r, const char* name) { return format_number(r.bound(name).rhs); };
    for (const auto& r : reports) {
        os << r.seed << ',' << r.n << ',' << r.k << ',' << r.k_source << ',' << r.g_total << ',' << r.mmc << ','
           << r.mfc << ',' << r.gr << ',' << r.br << ',' << r.observable << ',' << r.max_rmmc_p << ','
           << rhs(r, "mmc_2nk1") << ',' << rhs(r, "mmc_14nlgk") << ',' << rhs(r, "br_10nk1") << ','
           << rhs(r, "br_80nlgk") << ',' << rhs(r, "observable_16nlgk") << ',' << (r.all_pass ? 1 : 0) << '\n';
    }
    std::vector<std::pair<int, int>> groups;
    for (const auto& r : reports)
        if (std::find(groups.begin(), groups.end(), std::pair{r.n, r.k}) == groups.end()) groups.emplace_back(r.n, r.k);
    for (const auto& [n, k] : groups) {
        double sums[7] = {};
        std::size_t cnt = 0;
        bool pass = true;
        const RunReport* first = nullptr;
        for (const auto& r : reports) {
            if (r.n != n || r.k != k) continue;
            if (!first) first = &r;
            ++cnt;
            const std::size_t vals[7] = {r.g_total, r.mmc, r.mfc, r.gr, r.br, r.observable,
                                         static_cast<std::size_t>(r.max_rmmc_p)};
            for (int i = 0; i < 7; ++i) sums[i] += static_cast<double>(vals[i]);
            pass = pass && r.all_pass;
        }
        os << "mean," << n << ',' << k << ',' << first->k_source;
        for (double s : sums) os << ',' << format_number(s / static_cast<double>(cnt));
        os << ',' << rhs(*first, "mmc_2nk1") << ',' << rhs(*first, "mmc_14nlgk") << ',' << rhs(*first, "br_10nk1")
           << ',' << rhs(*first, "br_80nlgk") << ',' << rhs(*first, "observable_16nlgk") << ',' << (pass ? 1 : 0)
           << '\n';
    }
}

// ---------------------------------------------------------------------------
// Small-n exact chain: OPT oracle, goodbound, certificates, independent sets.

struct ExactReport {
    std::size_t n = 0, g = 0, gr = 0, opt = 0, mis = 0;
    int k = 2;
    bool goodbound = false;        // |GR|/2 + |X| <= |X u OPT|
    std::size_t gr_backslash = 0, gr_slash = 0;
    bool certificates = false;     // extraction succeeded against X u OPT and X u G
    bool family_bounds = false;    // |OPT| >= each family's marking count
    bool independent_bound = false;  // |I|/2 + |X| <= |X u OPT|
    bool main_inequality = false;  // |G| <= 188 n lg k + 4|X u OPT|
    std::string failure;
    bool ok() const { return goodbound && certificates && family_bounds && independent_bound && main_inequality; }
};

inline ExactReport run_exact(const Permutation& perm) {
    ExactReport r;
    r.n = static_cast<std::size_t>(perm.size());
    const auto aug = greedy_sweep(perm);
    const auto cls = classify_all(aug);
    const auto opt = brute_force_opt(perm);
    r.g = cls.tally.g_total;
    r.gr = cls.tally.gr;
    r.opt = opt.size();
    r.goodbound = r.gr + 2 * r.n <= 2 * (r.n + r.opt);
    try {
        const Families fam = good_rectangles(aug, cls.records);
        r.gr_backslash = fam.backslash.rects.size();
        r.gr_slash = fam.slash.rects.size();
        r.certificates = true;
        r.family_bounds = true;
        for (const RectFamily* f : {&fam.backslash, &fam.slash}) {
            const Certificate c = extract_certificate(*f, opt.superset);
            extract_certificate(*f, aug.points());
            r.certificates = r.certificates && c.markings.size() == f->rects.size();
            r.family_bounds = r.family_bounds && r.opt >= c.markings.size();
        }
    } catch (const InvariantError& e) {
        r.failure = e.what();
    }
    r.mis = max_independent_set(perm).size();
    r.independent_bound = r.mis + 2 * r.n <= 2 * (r.n + r.opt);
    r.k = std::max(2, infer_decomposition(perm).k);
    const long long xopt = static_cast<long long>(r.n + r.opt);
    r.main_inequality = LogBound{188 * static_cast<long long>(r.n), r.k}.admits(static_cast<long long>(r.g) - 4 * xopt);
    return r;
}

}  // namespace arbor
