// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "tokfuse/core.hpp"

namespace tokfuse {

/// Marks an input token that a pruning strategy dropped.
inline constexpr std::int64_t kUnassigned = -1;

/// Output of any reduction strategy.
///
/// `assignment[m]` is the output row that input token m was fused into or kept
/// as, or kUnassigned for tokens a pruning strategy discarded. Output rows are
/// ordered by the smallest input index assigned to them.
struct ReducedSequence {
    TokenSequence tokens;
    std::vector<std::uint64_t> weights;
    std::vector<std::int64_t> assignment;
    /// Number of similarity evaluations the strategy performed.
    std::uint64_t pair_eval_count = 0;

    std::size_t size() const noexcept { return tokens.rows(); }
};

/// Threshold anchors for the input-length-dependent threshold: (256, 0.9) and
/// (3328, 0.7), interpolated linearly and clamped outside that range.
struct ThresholdAnchors {
    double low_m = 256.0;
    double high_tau = 0.9;
    double high_m = 3328.0;
    double low_tau = 0.7;
};

inline constexpr ThresholdAnchors kDefaultAnchors{};

/// Sequential greedy fusion.
///
/// Scans the input once. Each token is compared with every output token so far;
/// if the best similarity (lowest output index on ties) is strictly above `tau`
/// the token is folded into that output as a running weighted mean, otherwise
/// it is appended as a new output of weight 1. Centroids are accumulated in
/// double and not renormalised.
///
/// Validates `tokens`; an empty input gives an empty result.
ReducedSequence fuse(const TokenSequence& tokens, double tau);

double dynamic_threshold(std::int64_t num_tokens, const ThresholdAnchors& anchors = kDefaultAnchors);

/// fuse() with the threshold picked from the input length.
ReducedSequence fuse_auto(const TokenSequence& tokens);

}  // namespace tokfuse
