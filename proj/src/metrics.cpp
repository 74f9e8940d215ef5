// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace tokfuse {

std::vector<std::size_t> complete_assignment(const TokenSequence& input, const ReducedSequence& reduced) {
    if (reduced.assignment.size() != input.rows()) {
        throw ShapeError(fmt::format("assignment covers {} tokens, input has {}", reduced.assignment.size(),
                                     input.rows()));
    }
    if (input.rows() > 0 && reduced.tokens.dims() != input.dims()) {
        throw ShapeError(
            fmt::format("reduced tokens have {} dims, input has {}", reduced.tokens.dims(), input.dims()));
    }
    const std::size_t kept = reduced.tokens.rows();
    std::vector<std::size_t> out(input.rows());
    for (std::size_t m = 0; m < input.rows(); ++m) {
        const std::int64_t a = reduced.assignment[m];
        if (a != kUnassigned) {
            if (a < 0 || static_cast<std::size_t>(a) >= kept) {
                throw ShapeError(fmt::format("token {} assigned to output {} of {}", m, a, kept));
            }
            out[m] = static_cast<std::size_t>(a);
            continue;
        }
        if (kept == 0) {
            throw ShapeError(fmt::format("token {} is unassigned and no output tokens were kept", m));
        }
        std::size_t best = 0;
        double best_sim = -2.0;
        for (std::size_t j = 0; j < kept; ++j) {
            const double sim = cosine_similarity(input.row(m), reduced.tokens.row(j));
            if (sim > best_sim) {
                best_sim = sim;
                best = j;
            }
        }
        out[m] = best;
    }
    return out;
}

ReconstructionError reconstruction_error(const TokenSequence& input, const ReducedSequence& reduced) {
    const auto mapping = complete_assignment(input, reduced);
    ReconstructionError err;
    err.per_token.resize(input.rows());
    double total = 0.0;
    for (std::size_t m = 0; m < input.rows(); ++m) {
        const double e = 1.0 - cosine_similarity(input.row(m), reduced.tokens.row(mapping[m]));
        err.per_token[m] = e;
        total += e;
        err.max = std::max(err.max, e);
    }
    if (input.rows() > 0) {
        err.mean = total / static_cast<double>(input.rows());
    }
    // Averaging can round a constant error one ulp above the max.
    err.mean = std::min(err.mean, err.max);
    return err;
}

double attention_savings(std::uint64_t input_tokens, std::uint64_t output_tokens, std::uint64_t text_tokens) {
    if (output_tokens > input_tokens) {
        throw DomainError(fmt::format("output token count {} exceeds input count {}", output_tokens, input_tokens));
    }
    if (input_tokens + text_tokens == 0) {
        throw DomainError("attention savings undefined for an empty context");
    }
    const double ratio =
        static_cast<double>(output_tokens + text_tokens) / static_cast<double>(input_tokens + text_tokens);
    return 1.0 - ratio * ratio;
}

ReductionReport make_report(const TokenSequence& input, const ReducedSequence& reduced, std::uint64_t text_tokens) {
    ReductionReport r;
    r.input_tokens = input.rows();
    r.output_tokens = reduced.tokens.rows();
    r.retention_ratio = r.input_tokens == 0 ? 1.0 : static_cast<double>(r.output_tokens) / r.input_tokens;
    r.text_tokens = text_tokens;
    if (r.input_tokens > 0) {
        const auto err = reconstruction_error(input, reduced);
        r.recon_error_mean = err.mean;
        r.recon_error_max = err.max;
    }
    r.attention_savings =
        r.input_tokens + text_tokens == 0 ? 0.0 : attention_savings(r.input_tokens, r.output_tokens, text_tokens);
    r.pair_eval_count = reduced.pair_eval_count;
    r.weights = reduced.weights;
    r.assignment = reduced.assignment;
    return r;
}

nlohmann::ordered_json to_json(const ReductionReport& r) {
    nlohmann::ordered_json j;
    j["input_tokens"] = r.input_tokens;
    j["output_tokens"] = r.output_tokens;
    j["retention_ratio"] = r.retention_ratio;
    j["strategy"] = r.strategy;
    j["tau"] = r.tau ? nlohmann::ordered_json(*r.tau) : nlohmann::ordered_json(nullptr);
    j["budget"] = r.budget ? nlohmann::ordered_json(*r.budget) : nlohmann::ordered_json(nullptr);
    j["seed"] = r.seed;
    j["text_tokens"] = r.text_tokens;
    j["quality_metric"] = "cosine_reconstruction_error_proxy";
    j["recon_error_mean"] = r.recon_error_mean;
    j["recon_error_max"] = r.recon_error_max;
    j["attention_savings"] = r.attention_savings;
    j["pair_eval_count"] = r.pair_eval_count;
    j["weights"] = r.weights;
    j["assignment"] = r.assignment;
    // Last so byte comparisons can drop one line.
    j["wall_time_ms"] = r.wall_time_ms;
    return j;
}

}  // namespace tokfuse
