// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "tokfuse/baselines.hpp"
#include "tokfuse/core.hpp"
#include "tokfuse/metrics.hpp"
#include "tokfuse/tofu.hpp"

namespace tokfuse {

struct ReductionRun {
    ReducedSequence reduced;
    ReductionReport report;
};

/// Runs the strategy selected by `config` and builds its report, timing the
/// reduction itself. `scores` is required for topk and ignored otherwise. For
/// tofu_auto the report's tau is the threshold actually used.
ReductionRun run_reduction(const TokenSequence& tokens, const ReductionConfig& config,
                           const std::optional<ImportanceScores>& scores = std::nullopt,
                           std::uint64_t text_tokens = 0);

}  // namespace tokfuse
