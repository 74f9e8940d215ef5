// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/tofu.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <fmt/format.h>

namespace tokfuse {

namespace {

// Running centroids kept in double; converted to float once at the end.
class CentroidSet {
public:
    explicit CentroidSet(std::size_t dims) : m_dims(dims) {}

    std::size_t size() const noexcept { return m_weights.size(); }

    std::span<const double> centroid(std::size_t j) const { return {m_sums.data() + j * m_dims, m_dims}; }

    double sq_norm(std::size_t j) const { return m_sq_norms[j]; }

    void append(std::span<const float> v) {
        m_sums.insert(m_sums.end(), v.begin(), v.end());
        m_weights.push_back(1);
        m_sq_norms.push_back(squared_norm(centroid(size() - 1)));
    }

    void absorb(std::size_t j, std::span<const float> v) {
        const double w = static_cast<double>(m_weights[j]);
        double* t = m_sums.data() + j * m_dims;
        for (std::size_t n = 0; n < m_dims; ++n) {
            t[n] = (t[n] * w + static_cast<double>(v[n])) / (w + 1.0);
        }
        m_weights[j] += 1;
        m_sq_norms[j] = squared_norm(centroid(j));
    }

    TokenSequence to_tokens() const {
        std::vector<float> out(m_sums.size());
        std::transform(m_sums.begin(), m_sums.end(), out.begin(), [](double x) { return static_cast<float>(x); });
        return {size(), m_dims, std::move(out)};
    }

    std::vector<std::uint64_t> take_weights() { return std::move(m_weights); }

private:
    std::size_t m_dims;
    std::vector<double> m_sums;
    std::vector<std::uint64_t> m_weights;
    std::vector<double> m_sq_norms;
};

}  // namespace

ReducedSequence fuse(const TokenSequence& tokens, double tau) {
    validate_sequence(tokens);
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw DomainError(fmt::format("tau = {} lies outside [-1, 1]", tau));
    }

    ReducedSequence out;
    const std::size_t count = tokens.rows();
    if (count == 0) {
        out.tokens = TokenSequence(0, tokens.dims());
        return out;
    }

    CentroidSet targets(tokens.dims());
    out.assignment.assign(count, kUnassigned);

    targets.append(tokens.row(0));
    out.assignment[0] = 0;

    for (std::size_t m = 1; m < count; ++m) {
        const auto v = tokens.row(m);
        const double v_sq = squared_norm(v);

        std::size_t best = 0;
        double best_sim = -2.0;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            // A centroid can only collapse to zero through rounding; it then
            // never attracts anything.
            const double t_sq = targets.sq_norm(j);
            const double sim =
                t_sq > 0.0 ? cosine_from_parts(dot(targets.centroid(j), v), t_sq, v_sq) : -1.0;
            if (sim > best_sim) {
                best_sim = sim;
                best = j;
            }
        }
        out.pair_eval_count += targets.size();

        if (best_sim > tau) {
            targets.absorb(best, v);
            out.assignment[m] = static_cast<std::int64_t>(best);
        } else {
            targets.append(v);
            out.assignment[m] = static_cast<std::int64_t>(targets.size() - 1);
        }
    }

    out.tokens = targets.to_tokens();
    out.weights = targets.take_weights();
    return out;
}

double dynamic_threshold(std::int64_t num_tokens, const ThresholdAnchors& anchors) {
    if (num_tokens <= 0) {
        throw DomainError(fmt::format("dynamic threshold needs at least one token, got {}", num_tokens));
    }
    const double m = static_cast<double>(num_tokens);
    if (m <= anchors.low_m) {
        return anchors.high_tau;
    }
    if (m >= anchors.high_m) {
        return anchors.low_tau;
    }
    const double frac = (m - anchors.low_m) / (anchors.high_m - anchors.low_m);
    return anchors.high_tau - (anchors.high_tau - anchors.low_tau) * frac;
}

ReducedSequence fuse_auto(const TokenSequence& tokens) {
    if (tokens.rows() == 0) {
        throw DomainError("automatic threshold needs at least one token");
    }
    return fuse(tokens, dynamic_threshold(static_cast<std::int64_t>(tokens.rows())));
}

}  // namespace tokfuse
