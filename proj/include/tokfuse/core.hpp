// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tokfuse {

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch one type; the concrete class tells them which contract
// was violated.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInputError : public Error {
public:
    DegenerateInputError(const std::string& what, std::size_t index) : Error(what), m_index(index) {}
    std::size_t index() const noexcept { return m_index; }

private:
    std::size_t m_index;
};

class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what), m_row(row), m_col(col) {}
    std::size_t row() const noexcept { return m_row; }
    std::size_t col() const noexcept { return m_col; }

private:
    std::size_t m_row;
    std::size_t m_col;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Smallest row norm accepted by validation; below it cosine similarity is undefined.
inline constexpr double kMinNorm = 1e-12;

/// Ordered M x N matrix of token embeddings, row-major, one token per row.
///
/// Construction only checks the buffer size. The reduction strategies call
/// validate_sequence() themselves.
class TokenSequence {
public:
    TokenSequence() = default;
    TokenSequence(std::size_t rows, std::size_t dims);
    TokenSequence(std::size_t rows, std::size_t dims, std::vector<float> data);

    static TokenSequence from_rows(const std::vector<std::vector<float>>& rows);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t dims() const noexcept { return m_dims; }
    bool empty() const noexcept { return m_rows == 0; }

    std::span<const float> row(std::size_t i) const {
        return {m_data.data() + i * m_dims, m_dims};
    }
    std::span<float> row(std::size_t i) { return {m_data.data() + i * m_dims, m_dims}; }

    std::span<const float> data() const noexcept { return m_data; }
    std::span<float> data() noexcept { return m_data; }

    bool operator==(const TokenSequence&) const = default;

private:
    std::size_t m_rows = 0;
    std::size_t m_dims = 0;
    std::vector<float> m_data;
};

namespace detail {

// Four independent partial sums combined in a fixed order. Every similarity in
// the library goes through this, so a given pair of rows always yields the
// same bits regardless of caller.
template <typename A, typename B>
inline double dot_impl(std::span<const A> a, std::span<const B> b) {
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
        s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
        s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
    }
    for (; i < n; ++i) {
        s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

/// Dot product accumulated in double with a fixed summation order.
inline double dot(std::span<const float> a, std::span<const float> b) { return detail::dot_impl(a, b); }
inline double dot(std::span<const double> a, std::span<const float> b) { return detail::dot_impl(a, b); }
inline double dot(std::span<const double> a, std::span<const double> b) { return detail::dot_impl(a, b); }

inline double squared_norm(std::span<const float> a) { return detail::dot_impl(a, a); }
inline double squared_norm(std::span<const double> a) { return detail::dot_impl(a, a); }

/// Cosine similarity from a precomputed dot product and squared norms,
/// clamped to [-1, 1]. sqrt(x * y) keeps it exactly symmetric in the norms.
inline double cosine_from_parts(double dot_ab, double sq_norm_a, double sq_norm_b) {
    const double s = dot_ab / std::sqrt(sq_norm_a * sq_norm_b);
    return std::clamp(s, -1.0, 1.0);
}

/// Cosine similarity of two embeddings, accumulated in double and clamped.
/// Throws ShapeError on dimension mismatch and DegenerateInputError when
/// either vector has norm below kMinNorm (index 0 or 1 names the argument).
double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// Returns `seq` unchanged when every entry is finite and every row has norm
/// of at least kMinNorm. Throws NonFiniteError / DegenerateInputError naming
/// the first offending row otherwise. Also rejects N = 0 with ShapeError.
const TokenSequence& validate_sequence(const TokenSequence& seq);

enum class Strategy { tofu, tofu_auto, random, topk, stride, oracle };

std::string_view to_string(Strategy s) noexcept;
/// Accepts both `tofu_auto` and `tofu-auto` spellings.
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Selects a strategy and carries exactly the parameters it needs.
struct ReductionConfig {
    Strategy strategy = Strategy::tofu;
    std::optional<double> tau;
    std::optional<std::size_t> budget;
    std::uint64_t seed = 0;

    /// Throws ConfigError if a required parameter is missing or an unused one
    /// is present, DomainError if tau lies outside [-1, 1].
    void validate() const;
};

}  // namespace tokfuse
