// arbor: generate instances, run GREEDY and its analysis, drive the oracles.
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad input.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arbor/cli.hpp"

namespace {

// Writes to --out when given, else stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw arbor::InputError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return arbor::cli::read_file(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GREEDY on arborally satisfied sets: pair taxonomy, block lemmas and bound checks (logs base 2)"};
    app.require_subcommand(1);

    int n = 0, k = 2, jobs = 1;
    std::uint64_t seed = 0;
    bool emit_tree = false, against_opt = false;
    std::string out_path, tree_path, input, level = "quick", csv_path;
    std::vector<int> ns, ks;
    std::vector<std::uint64_t> seeds;
    std::optional<int> k_override;

    auto* gen = app.add_subcommand("gen", "generate a k-decomposable permutation");
    gen->add_option("-n", n, "size")->required();
    gen->add_option("-k", k, "maximum fanout (>= 2)")->required();
    gen->add_option("-s,--seed", seed, "seed");
    gen->add_flag("--emit-tree", emit_tree, "append the witness tree line");
    gen->add_option("--out", out_path, "output file (default stdout)");

    auto* run = app.add_subcommand("run", "full pipeline on one instance; prints a JSON report");
    run->add_option("input", input, "permutation file ('-' for stdin); may hold a tree line")->required();
    run->add_option("--tree", tree_path, "tree file; inferred when absent");
    run->add_option("-k", k_override, "fanout used by the bounds (>= tree fanout)");
    run->add_option("--out", out_path, "output file (default stdout)");

    auto* exp = app.add_subcommand(
        "experiment",
        "grid of generated instances to CSV.\nColumns: " + std::string(arbor::experiment_csv_header()) +
            "\nbound_* hold right-hand sides; one 'mean' row per (n,k) follows the data rows.");
    exp->add_option("-n", ns, "sizes")->required()->delimiter(',');
    exp->add_option("-k", ks, "fanouts (>= 2)")->required()->delimiter(',');
    exp->add_option("-s,--seed", seeds, "seeds")->required()->delimiter(',');
    exp->add_option("--jobs", jobs, "worker threads");
    exp->add_option("--out", out_path, "CSV file (default stdout)");

    auto* ver = app.add_subcommand("verify", "built-in suites: quick (random) or exhaustive (all small n)");
    ver->add_option("--level", level, "quick|exhaustive");
    ver->add_option("-s,--seed", seed, "seed for quick");
    ver->add_option("--out", out_path, "output file (default stdout)");

    auto* opt = app.add_subcommand("opt", "minimum grid superset OPT(X) by exact search (n <= 6)");
    opt->add_option("input", input, "permutation file ('-' for stdin)")->required();
    opt->add_option("--out", out_path, "output file (default stdout)");

    auto* cert = app.add_subcommand("certificate", "good-rectangle certificate for both orientations");
    cert->add_option("input", input, "permutation file ('-' for stdin)")->required();
    cert->add_flag("--opt", against_opt, "certify against X u OPT instead of X u G (n <= 6)");
    cert->add_option("--csv", csv_path, "also write the markings as CSV");
    cert->add_option("--out", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        Sink sink(out_path);
        std::ostream& out = sink.stream();
        if (*gen) return arbor::cli::cmd_gen(n, k, seed, emit_tree, out);
        if (*run) {
            std::optional<std::string> tree;
            if (!tree_path.empty()) tree = arbor::cli::read_file(tree_path);
            return arbor::cli::cmd_run(read_input(input), tree, k_override, out);
        }
        if (*exp) {
            arbor::ExperimentSpec spec{ns, ks, seeds, jobs, {}};
            const int rc = arbor::cli::cmd_experiment(spec, out);
            out.flush();
            if (!out) throw arbor::InputError("failed writing " + (out_path.empty() ? "stdout" : out_path));
            return rc;
        }
        if (*ver) return arbor::cli::cmd_verify(level, seed, out, std::cerr);
        if (*opt) return arbor::cli::cmd_opt(read_input(input), out);
        if (*cert) {
            std::unique_ptr<std::ofstream> csv;
            if (!csv_path.empty()) {
                csv = std::make_unique<std::ofstream>(csv_path);
                if (!*csv) throw arbor::InputError("cannot write " + csv_path);
            }
            return arbor::cli::cmd_certificate(read_input(input), against_opt, out, csv.get());
        }
    } catch (const arbor::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
