// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <tuple>

#include <fmt/format.h>

namespace tokfuse {

namespace {

// Live centroids in one flat buffer, kept sorted by smallest member index: a
// merge keeps the lower slot and erases the higher one.
class LiveClusters {
public:
    LiveClusters(const TokenSequence& tokens) : m_dims(tokens.dims()) {
        const auto data = tokens.data();
        m_centroids.assign(data.begin(), data.end());
        m_sq_norms.resize(tokens.rows());
        m_weights.assign(tokens.rows(), 1);
        m_members.resize(tokens.rows());
        for (std::size_t m = 0; m < tokens.rows(); ++m) {
            m_members[m] = {m};
        }
        m_inv_norms.resize(tokens.rows());
        for (std::size_t m = 0; m < tokens.rows(); ++m) {
            refresh_norm(m);
        }
    }

    std::size_t size() const noexcept { return m_weights.size(); }

    std::span<const double> centroid(std::size_t j) const { return {m_centroids.data() + j * m_dims, m_dims}; }

    /// Index pair of the most similar live centroids (lexicographically
    /// smallest on ties) and their similarity.
    std::tuple<std::size_t, std::size_t, double> best_pair() const {
        // A pair is only scored exactly when a cheap estimate (dot times cached
        // inverse norms, within ~1e-15 of the exact value) cannot rule it out,
        // so the winner is the same as scoring every pair exactly.
        constexpr double kScreenMargin = 1e-12;
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best_sim = -2.0;
        for (std::size_t a = 0; a + 1 < size(); ++a) {
            const auto ca = centroid(a);
            for (std::size_t b = a + 1; b < size(); ++b) {
                const double d = dot(ca, centroid(b));
                if (d * m_inv_norms[a] * m_inv_norms[b] < best_sim - kScreenMargin) {
                    continue;
                }
                const double sim = exact_similarity(d, a, b);
                if (sim > best_sim) {
                    best_sim = sim;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        return {best_a, best_b, best_sim};
    }

    void merge(std::size_t keep, std::size_t gone) {
        const double wa = static_cast<double>(m_weights[keep]);
        const double wb = static_cast<double>(m_weights[gone]);
        double* ta = m_centroids.data() + keep * m_dims;
        const double* tb = m_centroids.data() + gone * m_dims;
        for (std::size_t n = 0; n < m_dims; ++n) {
            ta[n] = (ta[n] * wa + tb[n] * wb) / (wa + wb);
        }
        m_weights[keep] += m_weights[gone];
        refresh_norm(keep);

        std::vector<std::size_t> merged;
        merged.reserve(m_members[keep].size() + m_members[gone].size());
        std::merge(m_members[keep].begin(), m_members[keep].end(), m_members[gone].begin(), m_members[gone].end(),
                   std::back_inserter(merged));
        m_members[keep] = std::move(merged);

        const auto at = [](auto& v, std::size_t i) { return v.begin() + static_cast<std::ptrdiff_t>(i); };
        m_centroids.erase(at(m_centroids, gone * m_dims), at(m_centroids, (gone + 1) * m_dims));
        m_sq_norms.erase(at(m_sq_norms, gone));
        m_inv_norms.erase(at(m_inv_norms, gone));
        m_weights.erase(at(m_weights, gone));
        m_members.erase(at(m_members, gone));
    }

    ReducedSequence finish(std::size_t input_count, std::uint64_t evals) && {
        ReducedSequence out;
        std::vector<float> data(m_centroids.size());
        std::transform(m_centroids.begin(), m_centroids.end(), data.begin(),
                       [](double x) { return static_cast<float>(x); });
        out.tokens = TokenSequence(size(), m_dims, std::move(data));
        out.weights = std::move(m_weights);
        out.assignment.assign(input_count, kUnassigned);
        for (std::size_t j = 0; j < m_members.size(); ++j) {
            for (std::size_t m : m_members[j]) {
                out.assignment[m] = static_cast<std::int64_t>(j);
            }
        }
        out.pair_eval_count = evals;
        return out;
    }

private:
    double exact_similarity(double d, std::size_t a, std::size_t b) const {
        // A centroid can only reach zero norm through rounding; it never attracts.
        if (m_sq_norms[a] <= 0.0 || m_sq_norms[b] <= 0.0) {
            return -1.0;
        }
        return cosine_from_parts(d, m_sq_norms[a], m_sq_norms[b]);
    }

    void refresh_norm(std::size_t j) {
        m_sq_norms[j] = squared_norm(centroid(j));
        m_inv_norms[j] = m_sq_norms[j] > 0.0 ? 1.0 / std::sqrt(m_sq_norms[j]) : 0.0;
    }

    std::size_t m_dims;
    std::vector<double> m_centroids;
    std::vector<double> m_sq_norms;
    std::vector<double> m_inv_norms;
    std::vector<std::uint64_t> m_weights;
    std::vector<std::vector<std::size_t>> m_members;  // ascending
};

}  // namespace

ReducedSequence oracle_fuse(const TokenSequence& tokens, double tau) {
    validate_sequence(tokens);
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw DomainError(fmt::format("tau = {} lies outside [-1, 1]", tau));
    }

    LiveClusters live(tokens);
    std::uint64_t evals = 0;
    while (live.size() > 1) {
        const auto [best_a, best_b, best_sim] = live.best_pair();
        const std::uint64_t k = live.size();
        evals += k * (k - 1) / 2;

        if (!(best_sim > tau)) {
            break;
        }
        live.merge(best_a, best_b);
    }
    return std::move(live).finish(tokens.rows(), evals);
}

}  // namespace tokfuse
