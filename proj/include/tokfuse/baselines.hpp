// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tokfuse/core.hpp"
#include "tokfuse/tofu.hpp"

namespace tokfuse {

// Selection baselines. Each keeps a subsequence of the input: kept rows are
// copied bit for bit in source order with weight 1, dropped rows are left
// kUnassigned.

/// Per-token relevance supplied from outside (e.g. encoder CLS attention).
struct ImportanceScores {
    std::vector<double> scores;
};

/// `budget` distinct indices drawn uniformly with SeededRng (partial
/// Fisher-Yates over [0, M)), emitted in source order.
ReducedSequence random_sample(const TokenSequence& tokens, std::size_t budget, std::uint64_t seed);

/// Keeps the `budget` highest scores, lower index first on ties.
ReducedSequence topk_prune(const TokenSequence& tokens, const ImportanceScores& scores, std::size_t budget);

/// Keeps indices floor(i * M / budget), i = 0 .. budget - 1. Requires budget > 0.
ReducedSequence uniform_stride(const TokenSequence& tokens, std::size_t budget);

/// Builds a selection result from sorted, distinct source indices.
ReducedSequence select_rows(const TokenSequence& tokens, std::span<const std::size_t> kept);

/// Indices picked by random_sample, sorted ascending.
std::vector<std::size_t> random_indices(std::size_t count, std::size_t budget, std::uint64_t seed);

}  // namespace tokfuse
