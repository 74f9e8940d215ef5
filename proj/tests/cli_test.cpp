// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "tokfuse/iogen.hpp"

namespace tokfuse::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Drops the wall_time_ms line of a report, or the last column of a CSV.
std::string without_timing(const std::string& text, bool csv) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) {
        if (csv) {
            kept += line.substr(0, line.rfind(',')) + "\n";
        } else if (line.find("\"wall_time_ms\"") == std::string::npos) {
            kept += line + "\n";
        }
    }
    return kept;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        m_dir = fs::temp_directory_path() / ("tokfuse_cli_" + std::to_string(rd()));
        fs::create_directories(m_dir);
    }
    void TearDown() override {
        std::error_code ec;
        fs::remove_all(m_dir, ec);
    }
    std::string path(const std::string& name) const { return (m_dir / name).string(); }

    std::string write_fixture(const std::string& name, const TokenSequence& tokens) const {
        write_tokens(path(name), tokens);
        return path(name);
    }

    std::string cluster_fixture() const {
        return write_fixture("clusters.tok", generate_clusters({8, 32, 64, 0.05, 1, true}).tokens);
    }

private:
    fs::path m_dir;
};

TEST_F(CliTest, ReduceIdentityAtTauOne) {
    std::mt19937_64 gen(1);
    const auto input = testing::random_tokens(gen, 40, 6, false);
    const auto in = write_fixture("in.tok", input);
    const auto r = run({"reduce", "--input", in, "--strategy", "tofu", "--tau", "1.0", "--out", path("out.tok"),
                        "--report", path("rep.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(read_tokens(path("out.tok")), input);
    const auto report = nlohmann::json::parse(slurp(path("rep.json")));
    EXPECT_EQ(report["retention_ratio"], 1.0);
    EXPECT_EQ(report["output_tokens"], 40);
    EXPECT_EQ(report["weights"].size(), 40u);
    EXPECT_EQ(report["assignment"].size(), 40u);
}

TEST_F(CliTest, ReduceAutoReportsUpperThreshold) {
    std::mt19937_64 gen(2);
    const auto in = write_fixture("in.tok", testing::random_clustered_tokens(gen, 256, 16, 20, 0.3f));
    const auto r =
        run({"reduce", "--input", in, "--strategy", "tofu-auto", "--out", path("o.tok"), "--report", path("r.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto report = nlohmann::json::parse(slurp(path("r.json")));
    EXPECT_EQ(report["tau"], 0.9);
    EXPECT_EQ(report["strategy"], "tofu_auto");
}

TEST_F(CliTest, ReduceTopkWithCsvScores) {
    const auto input = TokenSequence::from_rows({{1, 0}, {0.8f, 0.6f}, {0, 1}});
    const auto in = write_fixture("in.tok", input);
    std::ofstream(path("scores.csv")) << "0.1\n0.9\n0.5\n";
    const auto r = run({"reduce", "--input", in, "--strategy", "topk", "--budget", "2", "--scores",
                        path("scores.csv"), "--out", path("o.tok")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(read_tokens(path("o.tok")), TokenSequence::from_rows({{0.8f, 0.6f}, {0, 1}}));
}

TEST_F(CliTest, ReduceBaselinesFromCsvInput) {
    std::ofstream(path("in.csv")) << "1,0\n0,1\n1,1\n2,1\n";
    for (const char* strategy : {"random", "stride"}) {
        const auto r = run({"reduce", "--input", path("in.csv"), "--strategy", strategy, "--budget", "2", "--seed",
                            "5", "--out", path("o.tok"), "--report", path("r.json")});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        EXPECT_EQ(read_tokens(path("o.tok")).rows(), 2u);
        const auto report = nlohmann::json::parse(slurp(path("r.json")));
        EXPECT_EQ(report["budget"], 2);
        EXPECT_TRUE(report["tau"].is_null());
    }
}

TEST_F(CliTest, ReduceErrors) {
    const auto in = write_fixture("in.tok", TokenSequence::from_rows({{1, 0}, {0, 1}}));
    const auto out = path("o.tok");
    EXPECT_EQ(run({"reduce", "--input", path("missing.tok"), "--strategy", "tofu", "--tau", "0.5", "--out", out}).code,
              kExitIo);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "tofu", "--out", out}).code, kExitUsage);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "tofu-auto", "--tau", "0.5", "--out", out}).code,
              kExitUsage);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "magic", "--out", out}).code, kExitUsage);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "tofu", "--tau", "2", "--out", out}).code, kExitUsage);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "random", "--budget", "3", "--out", out}).code,
              kExitUsage);
    EXPECT_EQ(run({"reduce", "--input", in, "--strategy", "topk", "--budget", "1", "--out", out}).code, kExitUsage);
    EXPECT_EQ(run({"reduce", "--strategy", "tofu"}).code, kExitUsage);

    std::ofstream(path("zero.csv")) << "1,0\n0,0\n";
    const auto r = run({"reduce", "--input", path("zero.csv"), "--strategy", "tofu", "--tau", "0.5", "--out", out});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("token 1"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

    std::ofstream(path("bad.tok")) << "XXXXjunkjunkjunk";
    EXPECT_EQ(run({"reduce", "--input", path("bad.tok"), "--strategy", "tofu", "--tau", "0.5", "--out", out}).code,
              kExitIo);
}

TEST_F(CliTest, SweepGridAndBoundaries) {
    const auto in = cluster_fixture();
    const auto r = run({"sweep", "--input", in, "--tau-min", "0.5", "--tau-max", "0.95", "--tau-step", "0.05"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "tau,K,retention_ratio,recon_error_mean,wall_time_ms");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 10);

    const auto pair = write_fixture("pair.tok", TokenSequence::from_rows({{1, 0}, {0, 1}}));
    const auto edges = run({"sweep", "--input", pair, "--tau-min", "-1", "--tau-max", "1", "--tau-step", "1"});
    ASSERT_EQ(edges.code, kExitOk) << edges.err;
    EXPECT_NE(edges.out.find("\n-1,1,0.5,"), std::string::npos) << edges.out;
    EXPECT_NE(edges.out.find("\n1,2,1,0,"), std::string::npos) << edges.out;
}

TEST_F(CliTest, SweepErrors) {
    const auto in = write_fixture("in.tok", TokenSequence::from_rows({{1, 0}}));
    EXPECT_EQ(run({"sweep", "--input", in, "--tau-min", "0.5", "--tau-max", "0.9", "--tau-step", "0"}).code,
              kExitUsage);
    EXPECT_EQ(run({"sweep", "--input", in, "--tau-min", "0.9", "--tau-max", "0.5", "--tau-step", "0.1"}).code,
              kExitUsage);
    EXPECT_EQ(run({"sweep", "--input", in, "--tau-min", "0.5", "--tau-max", "0.9", "--tau-step", "-0.1"}).code,
              kExitUsage);
}

TEST_F(CliTest, GenWritesTokensAndLabels) {
    const auto r = run({"gen", "--clusters", "2", "--per-cluster", "3", "--dims", "4", "--spread", "0", "--seed", "7",
                        "--out", path("g.tok")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto tokens = read_tokens(path("g.tok"));
    EXPECT_EQ(tokens.rows(), 6u);
    EXPECT_EQ(tokens.dims(), 4u);
    EXPECT_EQ(slurp(path("g.labels.csv")), "0\n0\n0\n1\n1\n1\n");
    EXPECT_EQ(encode_tokens(tokens), encode_tokens(generate_clusters({2, 3, 4, 0.0, 7, true}).tokens));

    EXPECT_EQ(run({"gen", "--clusters", "5", "--per-cluster", "3", "--dims", "4", "--spread", "0", "--out",
                   path("h.tok")})
                  .code,
              kExitUsage);
}

TEST_F(CliTest, CompareFusionOnClusters) {
    const auto in = cluster_fixture();
    const auto r = run({"compare", "--input", in, "--strategies", "tofu,oracle,tofu-auto,stride,random", "--tau",
                        "0.7", "--budget", "8", "--seed", "3", "--out-dir", path("cmp")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto csv = slurp(path("cmp/compare.csv"));
    EXPECT_EQ(csv, r.out);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "strategy,K,retention_ratio,recon_error_mean,attention_savings,pair_eval_count");
    EXPECT_NE(csv.find("\ntofu,8,0.03125,"), std::string::npos) << csv;
    EXPECT_NE(csv.find("\noracle,8,0.03125,"), std::string::npos) << csv;
    for (const char* name : {"tofu", "oracle", "tofu_auto", "stride", "random"}) {
        const auto report = nlohmann::json::parse(slurp(path(std::string("cmp/") + name + ".json")));
        EXPECT_EQ(report["strategy"], name);
        EXPECT_EQ(report["output_tokens"], 8);
    }
}

TEST_F(CliTest, CompareIsIndependentOfThreadCount) {
    const auto in = cluster_fixture();
    const std::vector<std::string> base = {"compare", "--input",  in,    "--strategies", "tofu,oracle,stride",
                                           "--tau",   "0.7",      "--budget", "16"};
    auto with_dir = [&](const std::string& dir) {
        auto args = base;
        args.insert(args.end(), {"--out-dir", path(dir)});
        return args;
    };
    ::setenv("TOKFUSE_THREADS", "1", 1);
    ASSERT_EQ(run(with_dir("one")).code, kExitOk);
    ::setenv("TOKFUSE_THREADS", "4", 1);
    ASSERT_EQ(run(with_dir("four")).code, kExitOk);
    ::unsetenv("TOKFUSE_THREADS");
    EXPECT_EQ(slurp(path("one/compare.csv")), slurp(path("four/compare.csv")));
    for (const char* name : {"tofu", "oracle", "stride"}) {
        EXPECT_EQ(without_timing(slurp(path(std::string("one/") + name + ".json")), false),
                  without_timing(slurp(path(std::string("four/") + name + ".json")), false));
    }
}

TEST_F(CliTest, CompareErrors) {
    const auto in = cluster_fixture();
    EXPECT_EQ(run({"compare", "--input", in, "--strategies", "tofu", "--out-dir", path("x")}).code, kExitUsage);
    EXPECT_EQ(run({"compare", "--input", in, "--strategies", "tofu,tofu", "--tau", "0.5", "--out-dir", path("x")})
                  .code,
              kExitUsage);
    EXPECT_EQ(run({"compare", "--input", in, "--strategies", "topk", "--budget", "3", "--out-dir", path("x")}).code,
              kExitUsage);
}

TEST_F(CliTest, BenchSmallGrid) {
    const auto r = run({"bench", "--sizes", "64,128", "--dims", "8,16", "--clusters", "4", "--strategies",
                        "tofu,oracle", "--out", path("bench.csv")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(slurp(path("bench.csv")), r.out);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "strategy,M,N,K,pair_eval_count,wall_time_ms");
    std::vector<std::uint64_t> tofu, oracle;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        ASSERT_EQ(f.size(), 6u);
        EXPECT_EQ(f[3], "4");
        (f[0] == "tofu" ? tofu : oracle).push_back(std::stoull(f[4]));
    }
    ASSERT_EQ(tofu.size(), 4u);
    ASSERT_EQ(oracle.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_GT(oracle[i], tofu[i]);

    EXPECT_EQ(run({"bench", "--sizes", "65", "--clusters", "4"}).code, kExitUsage);
    EXPECT_EQ(run({"bench", "--sizes", "64", "--strategies", "random"}).code, kExitUsage);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    const auto in = cluster_fixture();
    for (int i = 0; i < 2; ++i) {
        const auto tag = std::to_string(i);
        ASSERT_EQ(run({"reduce", "--input", in, "--strategy", "tofu", "--tau", "0.7", "--out", path("o" + tag),
                       "--report", path("r" + tag)})
                      .code,
                  kExitOk);
    }
    EXPECT_EQ(slurp(path("o0")), slurp(path("o1")));
    EXPECT_EQ(without_timing(slurp(path("r0")), false), without_timing(slurp(path("r1")), false));

    const std::vector<std::string> sweep = {"sweep", "--input", in, "--tau-min", "0.1", "--tau-max", "1",
                                            "--tau-step", "0.1"};
    EXPECT_EQ(without_timing(run(sweep).out, true), without_timing(run(sweep).out, true));
}

TEST_F(CliTest, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("reduce"), std::string::npos);
}

TEST(WorkerThreadsTest, ReadsEnvironment) {
    ::setenv("TOKFUSE_THREADS", "3", 1);
    EXPECT_EQ(worker_threads(), 3u);
    ::setenv("TOKFUSE_THREADS", "zero", 1);
    EXPECT_GE(worker_threads(), 1u);
    ::unsetenv("TOKFUSE_THREADS");
    EXPECT_GE(worker_threads(), 1u);
}

#ifdef TOKFUSE_BINARY
TEST(CliProcessTest, ExitCodesFromTheBinary) {
    const std::string bin = TOKFUSE_BINARY;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    const auto dir = fs::temp_directory_path() / "tokfuse_cli_proc";
    fs::create_directories(dir);
    const auto tok = (dir / "g.tok").string();
    EXPECT_EQ(status(bin + " gen --clusters 2 --per-cluster 3 --dims 4 --spread 0 --seed 7 --out " + tok), 0);
    EXPECT_EQ(status(bin + " reduce --input " + (dir / "missing.tok").string() +
                     " --strategy tofu --tau 0.5 --out " + (dir / "o.tok").string()),
              1);
    EXPECT_EQ(status(bin + " reduce --input " + tok + " --strategy tofu --tau nope --out x"), 2);
    fs::remove_all(dir);
}
#endif

}  // namespace
}  // namespace tokfuse::cli
