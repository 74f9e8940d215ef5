// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace tokfuse {

/// Portable seeded generator.
///
/// Raw bits come from std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The standard distributions are implementation-defined, so the
/// derived draws are spelled out here:
///   uniform01  = (x >> 11) * 2^-53, in [0, 1)
///   below(n)   = x mod n, rejecting x < (2^64 mod n)
///   gaussian   = Box-Muller on (1 - u1, u2), both outputs used in turn
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : m_engine(seed) {}

    std::uint64_t next_u64() { return m_engine(); }

    double uniform01() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be non-zero.
    std::uint64_t below(std::uint64_t n);

    double gaussian();

private:
    std::mt19937_64 m_engine;
    std::optional<double> m_spare;
};

}  // namespace tokfuse
