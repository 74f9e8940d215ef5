// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tokfuse/iogen.hpp"
#include "tokfuse/reduce.hpp"

namespace tokfuse::cli {

namespace {

namespace fs = std::filesystem;

// Fixed 6-significant-digit rendering; fmt ignores the C locale.
std::string num(double x) { return fmt::format("{:.6g}", x); }

std::string report_text(const ReductionReport& report) { return to_json(report).dump(2) + "\n"; }

/// Runs `jobs` independent tasks on up to worker_threads() threads. Results are
/// addressed by job index, so completion order does not matter. The first
/// failure by job index is rethrown.
void run_jobs(std::size_t jobs, const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(worker_threads(), jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

Strategy strategy_from_flag(const std::string& name) {
    const auto s = parse_strategy(name);
    if (!s) {
        throw ConfigError(fmt::format("unknown strategy '{}'", name));
    }
    return *s;
}

bool takes_tau(Strategy s) { return s == Strategy::tofu || s == Strategy::oracle; }
bool takes_budget(Strategy s) { return s == Strategy::random || s == Strategy::topk || s == Strategy::stride; }

TokenSequence load_input(const std::string& path) {
    auto tokens = read_tokens(path);
    validate_sequence(tokens);
    return tokens;
}

std::optional<ImportanceScores> load_scores(const std::optional<std::string>& path) {
    if (!path) return std::nullopt;
    return ImportanceScores{read_scores(*path)};
}

struct ReduceArgs {
    std::string input;
    std::string strategy;
    std::optional<double> tau;
    std::optional<std::size_t> budget;
    std::optional<std::string> scores;
    std::uint64_t seed = 0;
    std::uint64_t text_tokens = 0;
    std::string out;
    std::optional<std::string> report;
};

int cmd_reduce(const ReduceArgs& a, std::ostream& out) {
    ReductionConfig config;
    config.strategy = strategy_from_flag(a.strategy);
    config.tau = a.tau;
    config.budget = a.budget;
    config.seed = a.seed;
    config.validate();

    const auto tokens = load_input(a.input);
    const auto scores = load_scores(a.scores);
    const auto run = run_reduction(tokens, config, scores, a.text_tokens);

    write_tokens(a.out, run.reduced.tokens);
    if (a.report) {
        write_file_atomic(*a.report, report_text(run.report));
    }
    out << fmt::format("{}: {} -> {} tokens (retention {})\n", run.report.strategy, run.report.input_tokens,
                       run.report.output_tokens, num(run.report.retention_ratio));
    return kExitOk;
}

struct SweepArgs {
    std::string input;
    double tau_min = 0.0;
    double tau_max = 0.0;
    double tau_step = 0.0;
};

std::vector<double> tau_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError(fmt::format("--tau-step must be positive, got {}", step));
    }
    if (!(lo <= hi)) {
        throw ConfigError(fmt::format("--tau-min {} exceeds --tau-max {}", lo, hi));
    }
    if (lo < -1.0 || hi > 1.0) {
        throw DomainError(fmt::format("threshold range [{}, {}] leaves [-1, 1]", lo, hi));
    }
    // The tolerance absorbs representation error in the step, e.g. 0.45 / 0.05.
    const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> grid;
    for (std::size_t i = 0; i <= steps; ++i) {
        grid.push_back(std::min(lo + static_cast<double>(i) * step, hi));
    }
    return grid;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    const auto grid = tau_grid(a.tau_min, a.tau_max, a.tau_step);
    const auto tokens = load_input(a.input);

    std::string csv = "tau,K,retention_ratio,recon_error_mean,wall_time_ms\n";
    for (double tau : grid) {
        ReductionConfig config{Strategy::tofu, tau, std::nullopt, 0};
        const auto run = run_reduction(tokens, config);
        csv += fmt::format("{},{},{},{},{}\n", num(tau), run.report.output_tokens, num(run.report.retention_ratio),
                           num(run.report.recon_error_mean), num(run.report.wall_time_ms));
    }
    out << csv;
    return kExitOk;
}

struct GenArgs {
    ClusterSpec spec;
    bool non_orthogonal = false;
    std::string out;
    std::optional<std::string> labels;
};

fs::path default_labels_path(const fs::path& out) {
    auto p = out;
    p.replace_extension(".labels.csv");
    return p;
}

int cmd_gen(GenArgs a, std::ostream& out) {
    a.spec.orthogonal = !a.non_orthogonal;
    const auto sample = generate_clusters(a.spec);
    const fs::path labels_path = a.labels ? fs::path(*a.labels) : default_labels_path(a.out);

    std::string labels;
    for (auto l : sample.labels) {
        labels += fmt::format("{}\n", l);
    }
    write_tokens(a.out, sample.tokens);
    write_file_atomic(labels_path, labels);
    out << fmt::format("wrote {} x {} tokens to {} and labels to {}\n", sample.tokens.rows(), sample.tokens.dims(),
                       a.out, labels_path.string());
    return kExitOk;
}

struct CompareArgs {
    std::string input;
    std::vector<std::string> strategies;
    std::optional<double> tau;
    std::optional<std::size_t> budget;
    std::optional<std::string> scores;
    std::uint64_t seed = 0;
    std::uint64_t text_tokens = 0;
    std::string out_dir;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    std::vector<ReductionConfig> configs;
    std::set<Strategy> seen;
    for (const auto& name : a.strategies) {
        ReductionConfig c;
        c.strategy = strategy_from_flag(name);
        if (!seen.insert(c.strategy).second) {
            throw ConfigError(fmt::format("strategy '{}' listed twice", name));
        }
        if (takes_tau(c.strategy)) c.tau = a.tau;
        if (takes_budget(c.strategy)) c.budget = a.budget;
        c.seed = a.seed;
        c.validate();
        configs.push_back(c);
    }

    const auto tokens = load_input(a.input);
    const auto scores = load_scores(a.scores);
    if (seen.count(Strategy::topk) && !scores) {
        throw ConfigError("strategy topk needs --scores");
    }

    std::vector<ReductionReport> reports(configs.size());
    run_jobs(configs.size(), [&](std::size_t i) {
        reports[i] = run_reduction(tokens, configs[i], scores, a.text_tokens).report;
    });

    fs::create_directories(a.out_dir);
    std::string csv = "strategy,K,retention_ratio,recon_error_mean,attention_savings,pair_eval_count\n";
    for (const auto& r : reports) {
        write_file_atomic(fs::path(a.out_dir) / (r.strategy + ".json"), report_text(r));
        csv += fmt::format("{},{},{},{},{},{}\n", r.strategy, r.output_tokens, num(r.retention_ratio),
                           num(r.recon_error_mean), num(r.attention_savings), r.pair_eval_count);
    }
    write_file_atomic(fs::path(a.out_dir) / "compare.csv", csv);
    out << csv;
    return kExitOk;
}

struct BenchArgs {
    std::vector<std::size_t> sizes{1024, 2048};
    std::vector<std::size_t> dims{8};
    std::size_t clusters = 8;
    double spread = 0.05;
    std::uint64_t seed = 1;
    double tau = 0.7;
    std::vector<std::string> strategies{"tofu", "oracle"};
    std::optional<std::string> out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    std::vector<Strategy> strategies;
    for (const auto& name : a.strategies) {
        const auto s = strategy_from_flag(name);
        if (s != Strategy::tofu && s != Strategy::tofu_auto && s != Strategy::oracle) {
            throw ConfigError(fmt::format("bench supports tofu, tofu-auto and oracle, not '{}'", name));
        }
        strategies.push_back(s);
    }
    if (!(a.tau >= -1.0 && a.tau <= 1.0)) {
        throw DomainError(fmt::format("--tau {} lies outside [-1, 1]", a.tau));
    }

    struct Cell {
        std::size_t size;
        std::size_t dims;
    };
    std::vector<Cell> cells;
    for (auto m : a.sizes) {
        if (a.clusters == 0 || m % a.clusters != 0) {
            throw ConfigError(fmt::format("size {} is not a multiple of --clusters {}", m, a.clusters));
        }
        for (auto n : a.dims) cells.push_back({m, n});
    }

    std::vector<TokenSequence> inputs(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        inputs[c] = generate_clusters({a.clusters, cells[c].size / a.clusters, cells[c].dims, a.spread, a.seed, true})
                        .tokens;
    }

    const std::size_t jobs = cells.size() * strategies.size();
    std::vector<ReductionReport> reports(jobs);
    run_jobs(jobs, [&](std::size_t i) {
        const auto& tokens = inputs[i / strategies.size()];
        ReductionConfig config;
        config.strategy = strategies[i % strategies.size()];
        if (config.strategy != Strategy::tofu_auto) config.tau = a.tau;
        reports[i] = run_reduction(tokens, config).report;
    });

    std::string csv = "strategy,M,N,K,pair_eval_count,wall_time_ms\n";
    for (std::size_t i = 0; i < jobs; ++i) {
        const auto& cell = cells[i / strategies.size()];
        const auto& r = reports[i];
        csv += fmt::format("{},{},{},{},{},{}\n", r.strategy, cell.size, cell.dims, r.output_tokens,
                           r.pair_eval_count, num(r.wall_time_ms));
    }
    if (a.out) {
        write_file_atomic(*a.out, csv);
    }
    out << csv;
    return kExitOk;
}

}  // namespace

unsigned worker_threads() {
    if (const char* env = std::getenv("TOKFUSE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Visual token fusion and reduction baselines", "tokfuse"};
    app.require_subcommand(1);

    ReduceArgs reduce;
    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce one token file with one strategy");
    reduce_cmd->add_option("--input", reduce.input, "TOK1 or .csv token matrix")->required();
    reduce_cmd->add_option("--strategy", reduce.strategy, "tofu|tofu-auto|random|topk|stride|oracle")->required();
    reduce_cmd->add_option("--tau", reduce.tau, "Similarity threshold (tofu, oracle)");
    reduce_cmd->add_option("--budget", reduce.budget, "Tokens to keep (random, topk, stride)");
    reduce_cmd->add_option("--scores", reduce.scores, "Importance scores (topk): 1 x M TOK1 or one-column CSV");
    reduce_cmd->add_option("--seed", reduce.seed, "Seed for random sampling");
    reduce_cmd->add_option("--text-tokens", reduce.text_tokens, "Text tokens sharing the context (cost model)");
    reduce_cmd->add_option("--out", reduce.out, "Reduced tokens, TOK1")->required();
    reduce_cmd->add_option("--report", reduce.report, "Report JSON");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Fixed-threshold sweep, CSV on stdout");
    sweep_cmd->add_option("--input", sweep.input)->required();
    sweep_cmd->add_option("--tau-min", sweep.tau_min)->required();
    sweep_cmd->add_option("--tau-max", sweep.tau_max)->required();
    sweep_cmd->add_option("--tau-step", sweep.tau_step)->required();

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate clustered unit-norm tokens with labels");
    gen_cmd->add_option("--clusters", gen.spec.clusters)->required();
    gen_cmd->add_option("--per-cluster", gen.spec.per_cluster)->required();
    gen_cmd->add_option("--dims", gen.spec.dims)->required();
    gen_cmd->add_option("--spread", gen.spec.spread, "Expected noise norm per token")->required();
    gen_cmd->add_option("--seed", gen.spec.seed);
    gen_cmd->add_flag("--non-orthogonal", gen.non_orthogonal, "Skip centroid orthogonalisation");
    gen_cmd->add_option("--out", gen.out, "TOK1 output")->required();
    gen_cmd->add_option("--labels", gen.labels, "Labels CSV (default: <out>.labels.csv)");

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Run several strategies on one input");
    compare_cmd->add_option("--input", compare.input)->required();
    compare_cmd->add_option("--strategies", compare.strategies)->required()->delimiter(',');
    compare_cmd->add_option("--tau", compare.tau, "Threshold for tofu and oracle");
    compare_cmd->add_option("--budget", compare.budget, "Budget for random, topk and stride");
    compare_cmd->add_option("--scores", compare.scores);
    compare_cmd->add_option("--seed", compare.seed);
    compare_cmd->add_option("--text-tokens", compare.text_tokens);
    compare_cmd->add_option("--out-dir", compare.out_dir)->required();

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time fusion strategies over an (M, N) grid of clustered inputs");
    bench_cmd->add_option("--sizes", bench.sizes, "Token counts M")->delimiter(',');
    bench_cmd->add_option("--dims", bench.dims, "Dimensionalities N")->delimiter(',');
    bench_cmd->add_option("--clusters", bench.clusters);
    bench_cmd->add_option("--spread", bench.spread);
    bench_cmd->add_option("--seed", bench.seed);
    bench_cmd->add_option("--tau", bench.tau);
    bench_cmd->add_option("--strategies", bench.strategies)->delimiter(',');
    bench_cmd->add_option("--out", bench.out, "Also write the CSV here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "tokfuse: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (reduce_cmd->parsed()) return cmd_reduce(reduce, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, out);
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (compare_cmd->parsed()) return cmd_compare(compare, out);
        if (bench_cmd->parsed()) return cmd_bench(bench, out);
    } catch (const IoError& e) {
        err << "tokfuse: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "tokfuse: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "tokfuse: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace tokfuse::cli
