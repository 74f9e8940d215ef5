// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/reduce.hpp"

#include <chrono>

#include "tokfuse/oracle.hpp"

namespace tokfuse {

ReductionRun run_reduction(const TokenSequence& tokens, const ReductionConfig& config,
                           const std::optional<ImportanceScores>& scores, std::uint64_t text_tokens) {
    config.validate();
    if (config.strategy == Strategy::topk && !scores) {
        throw ConfigError("strategy topk requires importance scores");
    }

    std::optional<double> tau = config.tau;
    const auto start = std::chrono::steady_clock::now();
    ReducedSequence reduced;
    switch (config.strategy) {
        case Strategy::tofu:
            reduced = fuse(tokens, *config.tau);
            break;
        case Strategy::tofu_auto:
            tau = dynamic_threshold(static_cast<std::int64_t>(tokens.rows()));
            reduced = fuse(tokens, *tau);
            break;
        case Strategy::oracle:
            reduced = oracle_fuse(tokens, *config.tau);
            break;
        case Strategy::random:
            reduced = random_sample(tokens, *config.budget, config.seed);
            break;
        case Strategy::topk:
            reduced = topk_prune(tokens, *scores, *config.budget);
            break;
        case Strategy::stride:
            reduced = uniform_stride(tokens, *config.budget);
            break;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;

    ReductionRun run;
    run.report = make_report(tokens, reduced, text_tokens);
    run.report.strategy = std::string(to_string(config.strategy));
    run.report.tau = tau;
    run.report.budget = config.budget;
    run.report.seed = config.seed;
    run.report.wall_time_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    run.reduced = std::move(reduced);
    return run;
}

}  // namespace tokfuse
