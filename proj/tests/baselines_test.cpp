// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/baselines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "test_util.hpp"

namespace tokfuse {
namespace {

TokenSequence numbered_rows(std::size_t count) {
    std::vector<float> data;
    for (std::size_t m = 0; m < count; ++m) {
        data.push_back(static_cast<float>(m + 1));
        data.push_back(0.5f);
    }
    return {count, 2, std::move(data)};
}

std::vector<std::size_t> kept_indices(const ReducedSequence& r) {
    std::vector<std::size_t> kept;
    for (std::size_t m = 0; m < r.assignment.size(); ++m) {
        if (r.assignment[m] != kUnassigned) kept.push_back(m);
    }
    return kept;
}

void expect_subsequence(const TokenSequence& input, const ReducedSequence& r) {
    const auto kept = kept_indices(r);
    ASSERT_EQ(kept.size(), r.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        EXPECT_EQ(r.assignment[kept[i]], static_cast<std::int64_t>(i));
        EXPECT_EQ(std::memcmp(r.tokens.row(i).data(), input.row(kept[i]).data(), input.dims() * sizeof(float)), 0);
        EXPECT_EQ(r.weights[i], 1u);
    }
}

TEST(RandomSampleTest, FullAndEmptyBudget) {
    const auto input = numbered_rows(7);
    const auto all = random_sample(input, 7, 3);
    EXPECT_EQ(all.tokens, input);
    EXPECT_EQ(all.weights, std::vector<std::uint64_t>(7, 1));

    const auto none = random_sample(input, 0, 3);
    EXPECT_EQ(none.size(), 0u);
    EXPECT_EQ(none.assignment, std::vector<std::int64_t>(7, kUnassigned));
}

TEST(RandomSampleTest, DeterministicPerSeed) {
    const auto input = numbered_rows(50);
    const auto a = random_sample(input, 12, 99);
    const auto b = random_sample(input, 12, 99);
    EXPECT_EQ(kept_indices(a), kept_indices(b));
    EXPECT_EQ(a.tokens, b.tokens);
    // Different seeds almost surely differ on 12 of 50.
    EXPECT_NE(kept_indices(a), kept_indices(random_sample(input, 12, 100)));
}

TEST(RandomSampleTest, SubsequenceOfExactSize) {
    const auto input = numbered_rows(40);
    for (std::size_t budget = 0; budget <= 40; budget += 5) {
        const auto r = random_sample(input, budget, budget * 7 + 1);
        EXPECT_EQ(r.size(), budget);
        expect_subsequence(input, r);
    }
}

TEST(RandomSampleTest, BudgetTooLarge) {
    EXPECT_THROW(random_sample(numbered_rows(3), 4, 0), BudgetError);
}

TEST(RandomSampleTest, FixedVector) {
    // Cross-checked against an independent mt19937_64 + Fisher-Yates script.
    EXPECT_EQ(random_indices(20, 5, 42), (std::vector<std::size_t>{0, 1, 2, 6, 9}));
}

TEST(TopkPruneTest, AnalyticFixtures) {
    const auto input = numbered_rows(3);
    const auto r = topk_prune(input, {{0.1, 0.9, 0.5}}, 2);
    EXPECT_EQ(kept_indices(r), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(r.tokens.row(0)[0], 2.0f);
    EXPECT_EQ(r.tokens.row(1)[0], 3.0f);
    expect_subsequence(input, r);

    const auto ties = topk_prune(input, {{0.4, 0.4, 0.4}}, 2);
    EXPECT_EQ(kept_indices(ties), (std::vector<std::size_t>{0, 1}));

    const auto full = topk_prune(input, {{0.3, 0.1, 0.2}}, 3);
    EXPECT_EQ(full.tokens, input);
}

TEST(TopkPruneTest, Errors) {
    const auto input = numbered_rows(3);
    EXPECT_THROW(topk_prune(input, {{0.1, 0.2}}, 1), ShapeError);
    EXPECT_THROW(topk_prune(input, {{0.1, 0.2, 0.3}}, 4), BudgetError);
    EXPECT_THROW(topk_prune(input, {{0.1, std::nan(""), 0.3}}, 1), NonFiniteError);
}

TEST(UniformStrideTest, AnalyticFixtures) {
    EXPECT_EQ(kept_indices(uniform_stride(numbered_rows(6), 3)), (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_EQ(kept_indices(uniform_stride(numbered_rows(5), 2)), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(kept_indices(uniform_stride(numbered_rows(4), 4)), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(kept_indices(uniform_stride(numbered_rows(10), 1)), (std::vector<std::size_t>{0}));
}

TEST(UniformStrideTest, DistinctAndExactSize) {
    for (std::size_t m = 1; m <= 40; ++m) {
        const auto input = numbered_rows(m);
        for (std::size_t budget = 1; budget <= m; ++budget) {
            const auto r = uniform_stride(input, budget);
            ASSERT_EQ(r.size(), budget);
            expect_subsequence(input, r);
        }
    }
}

TEST(UniformStrideTest, Errors) {
    EXPECT_THROW(uniform_stride(numbered_rows(4), 0), BudgetError);
    EXPECT_THROW(uniform_stride(numbered_rows(4), 5), BudgetError);
}

TEST(RandomSampleTest, UniformInclusionFrequencies) {
    constexpr std::size_t kTokens = 20;
    constexpr std::size_t kBudget = 5;
    constexpr std::uint64_t kSeeds = 10000;
    std::vector<std::uint64_t> hits(kTokens, 0);
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        for (auto i : random_indices(kTokens, kBudget, seed)) ++hits[i];
    }
    const double p = static_cast<double>(kBudget) / kTokens;
    const double mean = p * kSeeds;
    const double sigma = std::sqrt(kSeeds * p * (1 - p));
    for (std::size_t i = 0; i < kTokens; ++i) {
        EXPECT_NEAR(static_cast<double>(hits[i]), mean, 3 * sigma) << "index " << i;
    }
}

}  // namespace
}  // namespace tokfuse
