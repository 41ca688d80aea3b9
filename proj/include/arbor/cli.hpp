// Command bodies behind tools/arbor. Each takes its inputs as values and
// streams, returns an exit code, and throws InputError on bad input.

#pragma once

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness.hpp"

namespace arbor::cli {

/// A permutation line, optionally followed by a tree line starting with '('.
struct InstanceText {
    std::string perm;
    std::optional<std::string> tree;
};

inline InstanceText split_instance(const std::string& text) {
    InstanceText out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '(') {
            if (out.tree) throw InputError("more than one tree line");
            out.tree = line.substr(first);
        } else {
            if (!out.perm.empty()) throw InputError("more than one permutation line");
            out.perm = line;
        }
    }
    if (out.perm.empty()) throw InputError("no permutation in input");
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline int cmd_gen(int n, int k, std::uint64_t seed, bool emit_tree, std::ostream& out) {
    const auto inst = generate_k_decomposable(n, k, seed);
    out << inst.perm.to_string() << '\n';
    if (emit_tree) out << inst.tree.serialize() << '\n';
    return 0;
}

inline int cmd_run(const std::string& instance, const std::optional<std::string>& tree_text, std::optional<int> k,
                   std::ostream& out) {
    const InstanceText parts = split_instance(instance);
    const Permutation perm = Permutation::parse(parts.perm);
    std::optional<DecompositionTree> tree;
    const auto text = tree_text ? tree_text : parts.tree;
    if (text) tree = parse_tree(*text, perm);
    const RunReport r = run_pipeline(perm, std::move(tree), k);
    out << r.to_json().dump(2) << '\n';
    return r.all_pass ? 0 : 1;
}

inline int cmd_experiment(const ExperimentSpec& spec, std::ostream& csv) {
    const auto reports = run_experiment(spec);
    write_experiment_csv(csv, reports);
    for (const auto& r : reports)
        if (!r.all_pass) return 1;
    return 0;
}

inline int cmd_opt(const std::string& instance, std::ostream& out) {
    const Permutation perm = Permutation::parse(split_instance(instance).perm);
    const OptResult opt = brute_force_opt(perm);
    nlohmann::json added = nlohmann::json::array();
    for (const auto& p : opt.added) added.push_back({p.key, p.time});
    out << nlohmann::json{{"n", perm.size()}, {"opt", opt.size()}, {"x_union_opt", opt.size() + static_cast<std::size_t>(perm.size())},
                          {"added", added}}
               .dump(2)
        << '\n';
    return 0;
}

/// Certificates for both families against X u G, or against X u OPT when
/// `against_opt` is set (small n only).
inline int cmd_certificate(const std::string& instance, bool against_opt, std::ostream& out,
                           std::ostream* csv = nullptr) {
    const Permutation perm = Permutation::parse(split_instance(instance).perm);
    const auto aug = greedy_sweep(perm);
    const auto cls = classify_all(aug);
    const Families fam = good_rectangles(aug, cls.records);
    std::optional<OptResult> opt;
    if (against_opt) opt = brute_force_opt(perm);
    const PointSet& superset = opt ? opt->superset : aug.points();
    std::vector<Certificate> certs;
    nlohmann::json fams = nlohmann::json::array();
    for (const RectFamily* f : {&fam.backslash, &fam.slash}) {
        certs.push_back(extract_certificate(*f, superset));
        nlohmann::json marks = nlohmann::json::array();
        for (const auto& m : certs.back().markings) {
            marks.push_back({{"p", {m.rect.p.key, m.rect.p.time}},
                             {"q", {m.rect.q.key, m.rect.q.time}},
                             {"line_x2", m.line_x2},
                             {"a", {m.a.key, m.a.time}},
                             {"b", {m.b.key, m.b.time}}});
        }
        fams.push_back({{"orientation", to_string(f->orientation)}, {"rectangles", f->rects.size()}, {"markings", marks}});
    }
    if (csv) write_certificate_csv(*csv, certs);
    out << nlohmann::json{{"superset", against_opt ? "x_union_opt" : "x_union_g"}, {"families", fams}}.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// verify

namespace detail {

struct VerifyLog {
    nlohmann::json suites = nlohmann::json::object();
    bool ok = true;
    std::ostream& log;

    void record(const std::string& suite, std::size_t instances, const std::optional<std::string>& failure) {
        suites[suite] = {{"instances", instances}, {"pass", !failure}};
        if (failure) {
            suites[suite]["counterexample"] = *failure;
            ok = false;
            log << "FAIL " << suite << ": " << *failure << '\n';
        } else {
            log << "ok   " << suite << " (" << instances << " instances)\n";
        }
    }
};

/// Per-permutation checks that do not need a tree or OPT.
inline std::optional<std::string> small_instance_failure(const Permutation& perm, bool literal) {
    const auto aug = greedy_sweep(perm);
    if (!(aug == greedy_sweep_reference(perm))) return "staircase and reference sweeps differ";
    if (!is_arborally_satisfied(aug.points()).satisfied) return "X u G not satisfied";
    const auto cls = classify_all(aug);
    if (!cls.checks.ok()) return cls.checks.summary(3);
    auto inv = check_greedy_invariants(aug);
    if (literal) {
        inv.merge(check_greedy_property_exhaustive(aug));
        inv.merge(check_hidden_exhaustive(aug));
    }
    if (!inv.ok()) return inv.summary(3);
    try {
        good_rectangles(aug, cls.records);
    } catch (const InvariantError& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

inline std::string perm_tag(const Permutation& p) { return "(" + p.to_string() + ")"; }

}  // namespace detail

/// quick: randomized suites from `seed`. exhaustive: every permutation up to
/// n = 8 through the small-instance checks, and up to n = 6 through goodbound.
inline int cmd_verify(const std::string& level, std::uint64_t seed, std::ostream& out, std::ostream& log) {
    if (level != "quick" && level != "exhaustive") throw InputError("level must be quick or exhaustive");
    detail::VerifyLog v{nlohmann::json::object(), true, log};

    if (level == "exhaustive") {
        std::size_t count = 0;
        std::optional<std::string> fail;
        for (int n = 1; n <= 8 && !fail; ++n) {
            std::vector<int> keys(static_cast<std::size_t>(n));
            std::iota(keys.begin(), keys.end(), 1);
            do {
                ++count;
                const Permutation p(keys);
                if (auto f = detail::small_instance_failure(p, n <= 6)) fail = detail::perm_tag(p) + ": " + *f;
            } while (!fail && std::next_permutation(keys.begin(), keys.end()));
        }
        v.record("small-instances", count, fail);

        count = 0;
        fail.reset();
        for (int n = 1; n <= 6 && !fail; ++n) {
            std::vector<int> keys(static_cast<std::size_t>(n));
            std::iota(keys.begin(), keys.end(), 1);
            do {
                ++count;
                const Permutation p(keys);
                if (!verify_goodbound(p).claim_holds) fail = detail::perm_tag(p) + ": goodbound";
            } while (!fail && std::next_permutation(keys.begin(), keys.end()));
        }
        v.record("goodbound", count, fail);
    } else {
        PortableRng rng(seed);
        std::optional<std::string> fail;
        std::size_t count = 0;
        for (int i = 0; i < 300 && !fail; ++i, ++count) {
            const int n = static_cast<int>(rng.uniform(1, 48));
            std::vector<int> keys(static_cast<std::size_t>(n));
            std::iota(keys.begin(), keys.end(), 1);
            rng.shuffle(keys);
            const Permutation p(keys);
            if (auto f = detail::small_instance_failure(p, n <= 10)) fail = detail::perm_tag(p) + ": " + *f;
        }
        v.record("random-permutations", count, fail);

        fail.reset();
        count = 0;
        for (int i = 0; i < 40 && !fail; ++i, ++count) {
            const int n = static_cast<int>(rng.uniform(1, 300));
            const int k = static_cast<int>(rng.uniform(2, 16));
            const auto s = static_cast<std::uint64_t>(rng.uniform(0, 1 << 30));
            auto inst = generate_k_decomposable(n, k, s);
            const auto r = run_pipeline(inst.perm, std::move(inst.tree), k, s);
            if (!r.all_pass) {
                fail = "generated n=" + std::to_string(n) + " k=" + std::to_string(k) + " seed=" + std::to_string(s) +
                       ": " + r.checks.summary(3);
            }
        }
        v.record("generated-pipeline", count, fail);

        fail.reset();
        count = 0;
        for (int i = 0; i < 30 && !fail; ++i, ++count) {
            const int n = static_cast<int>(rng.uniform(1, 5));
            std::vector<int> keys(static_cast<std::size_t>(n));
            std::iota(keys.begin(), keys.end(), 1);
            rng.shuffle(keys);
            const Permutation p(keys);
            const auto e = run_exact(p);
            if (!e.ok()) fail = detail::perm_tag(p) + ": exact chain " + e.failure;
        }
        v.record("exact-chain", count, fail);
    }
    out << nlohmann::json{{"level", level}, {"seed", seed}, {"suites", v.suites}, {"pass", v.ok}}.dump(2) << '\n';
    return v.ok ? 0 : 1;
}

}  // namespace arbor::cli
