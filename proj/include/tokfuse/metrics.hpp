// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tokfuse/core.hpp"
#include "tokfuse/tofu.hpp"

namespace tokfuse {

struct ReconstructionError {
    double mean = 0.0;
    double max = 0.0;
    std::vector<double> per_token;
};

/// Cosine distance from each input token to the output token it maps to.
///
/// Tokens left kUnassigned by a pruning strategy are mapped to their most
/// similar output token first (lowest output index on ties). An empty input
/// gives mean = max = 0.
ReconstructionError reconstruction_error(const TokenSequence& input, const ReducedSequence& reduced);

/// Output index for every input token, filling kUnassigned entries with the
/// nearest output token by cosine similarity.
std::vector<std::size_t> complete_assignment(const TokenSequence& input, const ReducedSequence& reduced);

/// Modeled fraction of quadratic attention cost saved when M visual tokens are
/// reduced to K next to L text tokens: 1 - ((K + L) / (M + L))^2.
double attention_savings(std::uint64_t input_tokens, std::uint64_t output_tokens, std::uint64_t text_tokens);

struct ReductionReport {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    double retention_ratio = 0.0;
    std::string strategy;
    std::optional<double> tau;
    std::optional<std::uint64_t> budget;
    std::uint64_t seed = 0;
    std::uint64_t text_tokens = 0;
    double recon_error_mean = 0.0;
    double recon_error_max = 0.0;
    double attention_savings = 0.0;
    std::uint64_t pair_eval_count = 0;
    double wall_time_ms = 0.0;
    std::vector<std::uint64_t> weights;
    std::vector<std::int64_t> assignment;
};

/// Fills every field except strategy/tau/budget/seed/wall_time_ms, which
/// describe how `reduced` was produced.
ReductionReport make_report(const TokenSequence& input, const ReducedSequence& reduced, std::uint64_t text_tokens);

nlohmann::ordered_json to_json(const ReductionReport& report);

}  // namespace tokfuse
