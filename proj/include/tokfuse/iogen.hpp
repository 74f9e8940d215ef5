// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tokfuse/core.hpp"

namespace tokfuse {

// TOK1 token matrix file, little-endian:
//   [0, 4)   magic "TOK1"
//   [4, 8)   u32 version (1)
//   [8, 12)  u32 M
//   [12, 16) u32 N
//   then M * N IEEE-754 binary32 values, row-major, and nothing after.

inline constexpr char kTokMagic[4] = {'T', 'O', 'K', '1'};
inline constexpr std::uint32_t kTokVersion = 1;
inline constexpr std::size_t kTokHeaderBytes = 16;

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public IoError {
public:
    using IoError::IoError;
};

class VersionError : public FormatError {
public:
    VersionError(const std::string& what, std::uint32_t found) : FormatError(what), m_found(found) {}
    std::uint32_t found() const noexcept { return m_found; }

private:
    std::uint32_t m_found;
};

class TruncationError : public FormatError {
public:
    TruncationError(const std::string& what, std::uint64_t expected, std::uint64_t actual)
        : FormatError(what), m_expected(expected), m_actual(actual) {}
    std::uint64_t expected() const noexcept { return m_expected; }
    std::uint64_t actual() const noexcept { return m_actual; }

private:
    std::uint64_t m_expected;
    std::uint64_t m_actual;
};

std::vector<std::uint8_t> encode_tokens(const TokenSequence& tokens);
TokenSequence decode_tokens(std::span<const std::uint8_t> bytes);

/// Validates, encodes and writes atomically (temporary file + rename).
void write_tokens(const std::filesystem::path& path, const TokenSequence& tokens);

/// Reads TOK1, or headerless CSV (one token per line) when the extension is
/// .csv. Does not validate norms.
TokenSequence read_tokens(const std::filesystem::path& path);

/// Scores from a 1 x M TOK1 file or a one-column CSV.
std::vector<double> read_scores(const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents);
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct ClusterSpec {
    std::size_t clusters = 1;
    std::size_t per_cluster = 1;
    std::size_t dims = 1;
    /// Expected norm of the noise added to each centroid: components are drawn
    /// as spread / sqrt(dims) * N(0, 1).
    double spread = 0.0;
    std::uint64_t seed = 0;
    bool orthogonal = true;

    std::size_t total() const noexcept { return clusters * per_cluster; }
};

struct ClusterSample {
    TokenSequence tokens;
    /// Cluster id per token; contiguous blocks of per_cluster in cluster order.
    std::vector<std::uint32_t> labels;
};

/// Unit-norm tokens scattered around `clusters` centroid directions.
///
/// Centroids come first from the seeded stream: one Gaussian vector each,
/// made orthonormal by sequential projection (Gram-Schmidt) when `orthogonal`
/// is set, else just normalised. Then per token, in cluster-block order,
/// normalize(centroid + spread / sqrt(dims) * g). Throws DomainError if
/// orthogonal centroids are requested with clusters > dims.
ClusterSample generate_clusters(const ClusterSpec& spec);

}  // namespace tokfuse
