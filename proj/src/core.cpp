// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/core.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tokfuse {

TokenSequence::TokenSequence(std::size_t rows, std::size_t dims)
    : m_rows(rows), m_dims(dims), m_data(rows * dims, 0.0f) {}

TokenSequence::TokenSequence(std::size_t rows, std::size_t dims, std::vector<float> data)
    : m_rows(rows), m_dims(dims), m_data(std::move(data)) {
    if (m_data.size() != rows * dims) {
        throw ShapeError(fmt::format("token buffer holds {} values, expected {} x {} = {}", m_data.size(),
                                     rows, dims, rows * dims));
    }
}

TokenSequence TokenSequence::from_rows(const std::vector<std::vector<float>>& rows) {
    if (rows.empty()) {
        return {};
    }
    const std::size_t dims = rows.front().size();
    std::vector<float> data;
    data.reserve(rows.size() * dims);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dims) {
            throw ShapeError(fmt::format("row {} has {} values, expected {}", i, rows[i].size(), dims));
        }
        data.insert(data.end(), rows[i].begin(), rows[i].end());
    }
    return {rows.size(), dims, std::move(data)};
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw ShapeError(fmt::format("dimension mismatch: {} vs {}", a.size(), b.size()));
    }
    const double na = squared_norm(a);
    const double nb = squared_norm(b);
    if (!(std::sqrt(na) >= kMinNorm)) {
        throw DegenerateInputError("cosine similarity of a zero-norm vector (argument 0)", 0);
    }
    if (!(std::sqrt(nb) >= kMinNorm)) {
        throw DegenerateInputError("cosine similarity of a zero-norm vector (argument 1)", 1);
    }
    return cosine_from_parts(dot(a, b), na, nb);
}

const TokenSequence& validate_sequence(const TokenSequence& seq) {
    if (seq.dims() == 0 && seq.rows() > 0) {
        throw ShapeError("token dimensionality must be at least 1");
    }
    for (std::size_t m = 0; m < seq.rows(); ++m) {
        const auto row = seq.row(m);
        for (std::size_t n = 0; n < row.size(); ++n) {
            if (!std::isfinite(row[n])) {
                throw NonFiniteError(fmt::format("non-finite value at token {}, component {}", m, n), m, n);
            }
        }
        if (!(std::sqrt(squared_norm(row)) >= kMinNorm)) {
            throw DegenerateInputError(fmt::format("token {} has zero norm", m), m);
        }
    }
    return seq;
}

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::tofu:
            return "tofu";
        case Strategy::tofu_auto:
            return "tofu_auto";
        case Strategy::random:
            return "random";
        case Strategy::topk:
            return "topk";
        case Strategy::stride:
            return "stride";
        case Strategy::oracle:
            return "oracle";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    if (name == "tofu") return Strategy::tofu;
    if (name == "tofu_auto" || name == "tofu-auto") return Strategy::tofu_auto;
    if (name == "random") return Strategy::random;
    if (name == "topk") return Strategy::topk;
    if (name == "stride") return Strategy::stride;
    if (name == "oracle") return Strategy::oracle;
    return std::nullopt;
}

void ReductionConfig::validate() const {
    const bool needs_tau = strategy == Strategy::tofu || strategy == Strategy::oracle;
    const bool needs_budget =
        strategy == Strategy::random || strategy == Strategy::topk || strategy == Strategy::stride;
    const auto name = to_string(strategy);
    if (needs_tau && !tau) {
        throw ConfigError(fmt::format("strategy {} requires a threshold (tau)", name));
    }
    if (!needs_tau && tau) {
        throw ConfigError(fmt::format("strategy {} does not take a threshold (tau)", name));
    }
    if (needs_budget && !budget) {
        throw ConfigError(fmt::format("strategy {} requires a budget", name));
    }
    if (!needs_budget && budget) {
        throw ConfigError(fmt::format("strategy {} does not take a budget", name));
    }
    if (tau && !(*tau >= -1.0 && *tau <= 1.0)) {
        throw DomainError(fmt::format("tau = {} lies outside [-1, 1]", *tau));
    }
}

}  // namespace tokfuse
