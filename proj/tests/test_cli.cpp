#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "arbor/cli.hpp"

using namespace arbor;

namespace {

nlohmann::json run_json(const std::string& instance, std::optional<int> k = std::nullopt, int* code = nullptr) {
    std::ostringstream os;
    const int rc = cli::cmd_run(instance, std::nullopt, k, os);
    if (code) *code = rc;
    return nlohmann::json::parse(os.str());
}

std::string experiment_csv(int jobs) {
    ExperimentSpec spec{{256}, {2, 4}, {0, 1, 2}, jobs, {}};
    std::ostringstream os;
    EXPECT_EQ(cli::cmd_experiment(spec, os), 0);
    return os.str();
}

int shell(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(CliGen, Examples) {
    std::ostringstream one;
    cli::cmd_gen(1, 2, 0, false, one);
    EXPECT_EQ(one.str(), "1\n");

    std::ostringstream os;
    cli::cmd_gen(5, 2, 7, true, os);
    const auto parts = cli::split_instance(os.str());
    ASSERT_TRUE(parts.tree);
    const Permutation p = Permutation::parse(parts.perm);
    EXPECT_EQ(p.size(), 5);
    EXPECT_TRUE(validate_tree(p, parse_tree(*parts.tree, p)));

    std::ostringstream bad;
    try {
        cli::cmd_gen(5, 1, 0, false, bad);
        FAIL() << "k=1 accepted";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("k must be >= 2"), std::string::npos);
    }
}

TEST(CliRun, Fixture) {
    int rc = -1;
    const auto j = run_json("3 1 2 5 4\n", std::nullopt, &rc);
    EXPECT_EQ(rc, 0);
    EXPECT_EQ(j["g_total"], 6);
    EXPECT_EQ(j["mmc"], 2);
    EXPECT_EQ(j["gr"], 4);
    EXPECT_EQ(j["br"], 0);
    EXPECT_EQ(j["k"], 2);
    EXPECT_EQ(j["k_source"], "inferred");
    EXPECT_TRUE(j["all_pass"].get<bool>());
    for (const auto& b : j["bounds"]) EXPECT_TRUE(b["pass"].get<bool>()) << b["name"];
}

TEST(CliRun, SingletonAndIdentity) {
    const auto one = run_json("1");
    EXPECT_EQ(one["g_total"], 0);
    EXPECT_EQ(one["mmc"], 0);
    EXPECT_TRUE(one["all_pass"].get<bool>());

    std::string id;
    for (int i = 1; i <= 100; ++i) id += std::to_string(i) + " ";
    const auto j = run_json(id);
    EXPECT_EQ(j["k"], 2);
    EXPECT_EQ(j["k_source"], "inferred");
    EXPECT_EQ(j["g_total"], 99);
    EXPECT_TRUE(j["all_pass"].get<bool>());
}

TEST(CliRun, TreeFromInstanceAndErrors) {
    std::ostringstream gen;
    cli::cmd_gen(64, 4, 3, true, gen);
    const auto j = run_json(gen.str(), 4);
    EXPECT_EQ(j["k_source"], "witness");
    EXPECT_TRUE(j["all_pass"].get<bool>());

    std::ostringstream os;
    EXPECT_THROW(cli::cmd_run("3 1 2 5 4", std::nullopt, 1, os), InputError);
    EXPECT_THROW(cli::cmd_run("1 1 2", std::nullopt, std::nullopt, os), InputError);
    EXPECT_THROW(cli::cmd_run("", std::nullopt, std::nullopt, os), InputError);
    EXPECT_THROW(cli::split_instance("1 2\n2 1\n"), InputError);
}

TEST(CliExperiment, RowsAndDeterminism) {
    const std::string a = experiment_csv(1);
    const std::string b = experiment_csv(8);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, experiment_csv(1));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, experiment_csv_header());
    int data = 0, mean = 0;
    while (std::getline(in, line)) {
        if (line.rfind("mean,", 0) == 0) ++mean;
        else ++data;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 16) << line;
    }
    EXPECT_EQ(data, 6);
    EXPECT_EQ(mean, 2);
}

TEST(CliOpt, SmallInstance) {
    std::ostringstream os;
    cli::cmd_opt("1 2 3", os);
    const auto j = nlohmann::json::parse(os.str());
    EXPECT_EQ(j["opt"], 2);
    EXPECT_EQ(j["x_union_opt"], 5);
    EXPECT_THROW(cli::cmd_opt("1 2 3 4 5 6 7", os), InputError);
}

TEST(CliCertificate, BothSupersets) {
    for (bool against_opt : {false, true}) {
        std::ostringstream os, csv;
        EXPECT_EQ(cli::cmd_certificate("3 1 2 5 4", against_opt, os, &csv), 0);
        const auto j = nlohmann::json::parse(os.str());
        ASSERT_EQ(j["families"].size(), 2u);
        EXPECT_EQ(j["families"][0]["markings"].size(), 2u);
        const std::string s = csv.str();
        EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 5);
    }
}

TEST(CliVerify, QuickPasses) {
    std::ostringstream out, log;
    EXPECT_EQ(cli::cmd_verify("quick", 0, out, log), 0) << log.str();
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_THROW(cli::cmd_verify("thorough", 0, out, log), InputError);
}

#ifdef ARBOR_CLI_PATH
TEST(CliBinary, ExitCodes) {
    const std::string bin = ARBOR_CLI_PATH;
    EXPECT_EQ(shell("echo '3 1 2 5 4' | " + bin + " run - > /dev/null"), 0);
    EXPECT_EQ(shell("echo '1 1' | " + bin + " run - > /dev/null 2>&1"), 2);
    EXPECT_EQ(shell(bin + " gen -n 5 -k 1 > /dev/null 2>&1"), 2);
    EXPECT_EQ(shell(bin + " gen -n 32 -k 4 -s 9 --emit-tree | " + bin + " run - -k 4 > /dev/null"), 0);
    EXPECT_EQ(shell(bin + " run /nonexistent/file > /dev/null 2>&1"), 2);
}
#endif
