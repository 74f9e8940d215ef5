// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "tokfuse/rng.hpp"

#include <cmath>
#include <numbers>

namespace tokfuse {

std::uint64_t SeededRng::below(std::uint64_t n) {
    // (2^64 - n) mod n == 2^64 mod n
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = m_engine();
        if (x >= threshold) {
            return x % n;
        }
    }
}

double SeededRng::gaussian() {
    if (m_spare) {
        const double z = *m_spare;
        m_spare.reset();
        return z;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    m_spare = r * std::sin(theta);
    return r * std::cos(theta);
}

}  // namespace tokfuse
