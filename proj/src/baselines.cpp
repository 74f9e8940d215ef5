// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tokfuse/rng.hpp"

namespace tokfuse {

namespace {

void check_budget(std::size_t budget, std::size_t count) {
    if (budget > count) {
        throw BudgetError(fmt::format("budget {} exceeds the {} available tokens", budget, count));
    }
}

}  // namespace

ReducedSequence select_rows(const TokenSequence& tokens, std::span<const std::size_t> kept) {
    ReducedSequence out;
    std::vector<float> data;
    data.reserve(kept.size() * tokens.dims());
    out.assignment.assign(tokens.rows(), kUnassigned);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto row = tokens.row(kept[i]);
        data.insert(data.end(), row.begin(), row.end());
        out.assignment[kept[i]] = static_cast<std::int64_t>(i);
    }
    out.tokens = TokenSequence(kept.size(), tokens.dims(), std::move(data));
    out.weights.assign(kept.size(), 1);
    return out;
}

std::vector<std::size_t> random_indices(std::size_t count, std::size_t budget, std::uint64_t seed) {
    check_budget(budget, count);
    std::vector<std::size_t> pool(count);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    SeededRng rng(seed);
    for (std::size_t i = 0; i < budget; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(count - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(budget);
    std::sort(pool.begin(), pool.end());
    return pool;
}

ReducedSequence random_sample(const TokenSequence& tokens, std::size_t budget, std::uint64_t seed) {
    validate_sequence(tokens);
    const auto kept = random_indices(tokens.rows(), budget, seed);
    return select_rows(tokens, kept);
}

ReducedSequence topk_prune(const TokenSequence& tokens, const ImportanceScores& scores, std::size_t budget) {
    validate_sequence(tokens);
    if (scores.scores.size() != tokens.rows()) {
        throw ShapeError(
            fmt::format("{} importance scores for {} tokens", scores.scores.size(), tokens.rows()));
    }
    for (std::size_t i = 0; i < scores.scores.size(); ++i) {
        if (!std::isfinite(scores.scores[i])) {
            throw NonFiniteError(fmt::format("non-finite importance score at index {}", i), i, 0);
        }
    }
    check_budget(budget, tokens.rows());

    std::vector<std::size_t> order(tokens.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& s = scores.scores;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    order.resize(budget);
    std::sort(order.begin(), order.end());
    return select_rows(tokens, order);
}

ReducedSequence uniform_stride(const TokenSequence& tokens, std::size_t budget) {
    validate_sequence(tokens);
    if (budget == 0) {
        throw BudgetError("stride sampling needs a budget of at least 1");
    }
    check_budget(budget, tokens.rows());
    const std::size_t count = tokens.rows();
    std::vector<std::size_t> kept(budget);
    for (std::size_t i = 0; i < budget; ++i) {
        kept[i] = i * count / budget;
    }
    return select_rows(tokens, kept);
}

}  // namespace tokfuse
