// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tokfuse/core.hpp"
#include "tokfuse/tofu.hpp"

namespace tokfuse {

/// Global greedy agglomeration over the full similarity matrix.
///
/// Every token starts as its own centroid of weight 1. Each round recomputes
/// the similarity of every pair of live centroids from scratch, takes the most
/// similar pair (lexicographically smallest on ties, centroids ranked by their
/// smallest member index) and, if that similarity is strictly above `tau`,
/// replaces the pair by its weighted mean. Stops at the first round whose best
/// pair does not exceed `tau`.
///
/// Quadratic work per round, cubic overall; pair_eval_count records every
/// similarity evaluated. Intended as a reference, not for production sizes.
ReducedSequence oracle_fuse(const TokenSequence& tokens, double tau);

}  // namespace tokfuse
