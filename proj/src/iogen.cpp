// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/iogen.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

#include <fmt/format.h>

#include "tokfuse/rng.hpp"

namespace tokfuse {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | bytes[offset + static_cast<std::size_t>(i)];
    }
    return v;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path.string()));
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError(fmt::format("error reading {}", path.string()));
    }
    return bytes;
}

bool has_csv_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return ext == ".csv";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::vector<float>> parse_csv(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    std::vector<std::vector<float>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<float> row;
        std::size_t start = 0;
        for (;;) {
            auto comma = line.find(',', start);
            const auto field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            float value = 0.0f;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
                throw FormatError(
                    fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line_no, field));
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError(fmt::format("{}:{}: {} columns, expected {}", path.string(), line_no, row.size(),
                                          rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<std::uint8_t> encode_tokens(const TokenSequence& tokens) {
    constexpr auto u32_max = std::numeric_limits<std::uint32_t>::max();
    if (tokens.rows() > u32_max || tokens.dims() > u32_max) {
        throw FormatError(fmt::format("{} x {} matrix does not fit a TOK1 header", tokens.rows(), tokens.dims()));
    }
    std::vector<std::uint8_t> out;
    out.reserve(kTokHeaderBytes + tokens.data().size() * 4);
    out.insert(out.end(), std::begin(kTokMagic), std::end(kTokMagic));
    put_u32(out, kTokVersion);
    put_u32(out, static_cast<std::uint32_t>(tokens.rows()));
    put_u32(out, static_cast<std::uint32_t>(tokens.dims()));
    for (float x : tokens.data()) {
        put_u32(out, std::bit_cast<std::uint32_t>(x));
    }
    return out;
}

TokenSequence decode_tokens(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kTokHeaderBytes) {
        throw TruncationError(
            fmt::format("TOK1 header needs {} bytes, file has {}", kTokHeaderBytes, bytes.size()),
            kTokHeaderBytes, bytes.size());
    }
    if (std::memcmp(bytes.data(), kTokMagic, 4) != 0) {
        std::string magic;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto c = static_cast<char>(bytes[i]);
            magic += std::isprint(static_cast<unsigned char>(c)) ? fmt::format("{}", c)
                                                                 : fmt::format("\\x{:02x}", bytes[i]);
        }
        throw FormatError(fmt::format("bad magic \"{}\", expected \"TOK1\"", magic));
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kTokVersion) {
        throw VersionError(fmt::format("unsupported TOK1 version {}, expected {}", version, kTokVersion), version);
    }
    const std::uint64_t rows = get_u32(bytes, 8);
    const std::uint64_t dims = get_u32(bytes, 12);
    // rows * dims < 2^64 always; the byte count may not be.
    const std::uint64_t values = rows * dims;
    if (values > (std::numeric_limits<std::uint64_t>::max() - kTokHeaderBytes) / 4 ||
        values > std::numeric_limits<std::size_t>::max() / 4) {
        throw FormatError(fmt::format("declared size {} x {} overflows", rows, dims));
    }
    const std::uint64_t expected = kTokHeaderBytes + values * 4;
    if (bytes.size() < expected) {
        throw TruncationError(fmt::format("truncated TOK1 payload: expected {} bytes, found {}", expected,
                                          bytes.size()),
                              expected, bytes.size());
    }
    if (bytes.size() > expected) {
        throw FormatError(
            fmt::format("trailing data after TOK1 payload: expected {} bytes, found {}", expected, bytes.size()));
    }
    std::vector<float> data(values);
    for (std::size_t i = 0; i < values; ++i) {
        data[i] = std::bit_cast<float>(get_u32(bytes, kTokHeaderBytes + i * 4));
    }
    return {rows, dims, std::move(data)};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
        }
        out.write(reinterpret_cast<const char*>(contents.data()), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw IoError(fmt::format("error writing {}", tmp.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(fmt::format("cannot move output into place at {}", path.string()));
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(contents.data()), contents.size()));
}

void write_tokens(const std::filesystem::path& path, const TokenSequence& tokens) {
    validate_sequence(tokens);
    write_file_atomic(path, encode_tokens(tokens));
}

TokenSequence read_tokens(const std::filesystem::path& path) {
    if (has_csv_extension(path)) {
        return TokenSequence::from_rows(parse_csv(path));
    }
    return decode_tokens(read_file(path));
}

std::vector<double> read_scores(const std::filesystem::path& path) {
    std::vector<double> scores;
    if (has_csv_extension(path)) {
        const auto rows = parse_csv(path);
        for (const auto& r : rows) {
            if (r.size() != 1) {
                throw FormatError(fmt::format("{}: score CSV must have exactly one column", path.string()));
            }
            scores.push_back(r.front());
        }
        return scores;
    }
    const auto tokens = decode_tokens(read_file(path));
    if (tokens.rows() != 1 && !tokens.empty()) {
        throw FormatError(fmt::format("{}: score matrix must be 1 x M, found {} x {}", path.string(),
                                      tokens.rows(), tokens.dims()));
    }
    for (float x : tokens.data()) {
        scores.push_back(x);
    }
    return scores;
}

ClusterSample generate_clusters(const ClusterSpec& spec) {
    if (spec.clusters == 0 || spec.per_cluster == 0 || spec.dims == 0) {
        throw DomainError("clusters, per-cluster count and dims must all be at least 1");
    }
    if (!(spec.spread >= 0.0) || !std::isfinite(spec.spread)) {
        throw DomainError(fmt::format("spread must be finite and non-negative, got {}", spec.spread));
    }
    if (spec.orthogonal && spec.clusters > spec.dims) {
        throw DomainError(fmt::format("cannot place {} orthogonal centroids in {} dimensions", spec.clusters,
                                      spec.dims));
    }

    SeededRng rng(spec.seed);
    const std::size_t dims = spec.dims;
    std::vector<std::vector<double>> centroids;
    centroids.reserve(spec.clusters);
    while (centroids.size() < spec.clusters) {
        std::vector<double> c(dims);
        for (auto& x : c) x = rng.gaussian();
        const double raw = std::sqrt(squared_norm(std::span<const double>(c)));
        if (spec.orthogonal) {
            for (const auto& prev : centroids) {
                const double proj = dot(std::span<const double>(prev), std::span<const double>(c));
                for (std::size_t n = 0; n < dims; ++n) c[n] -= proj * prev[n];
            }
        }
        const double norm = std::sqrt(squared_norm(std::span<const double>(c)));
        // Nearly in the span of earlier centroids: draw again.
        if (!(norm > 1e-6 * raw)) {
            continue;
        }
        for (auto& x : c) x /= norm;
        centroids.push_back(std::move(c));
    }

    ClusterSample sample;
    sample.tokens = TokenSequence(spec.total(), dims);
    sample.labels.reserve(spec.total());
    const double scale = spec.spread / std::sqrt(static_cast<double>(dims));
    std::vector<double> v(dims);
    std::size_t row = 0;
    for (std::size_t c = 0; c < spec.clusters; ++c) {
        for (std::size_t p = 0; p < spec.per_cluster; ++p, ++row) {
            for (;;) {
                for (std::size_t n = 0; n < dims; ++n) v[n] = centroids[c][n] + scale * rng.gaussian();
                const double norm = std::sqrt(squared_norm(std::span<const double>(v)));
                if (norm >= kMinNorm) {
                    auto out = sample.tokens.row(row);
                    for (std::size_t n = 0; n < dims; ++n) out[n] = static_cast<float>(v[n] / norm);
                    break;
                }
            }
            sample.labels.push_back(static_cast<std::uint32_t>(c));
        }
    }
    return sample;
}

}  // namespace tokfuse
