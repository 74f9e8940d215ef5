// Copyright (C) 2026 The tokfuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tokfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `tokfuse` invocation. `args` excludes the program name. Regular
/// output goes to `out`, diagnostics (one line per failure) to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for concurrent runs: TOKFUSE_THREADS if set to a positive
/// integer, else the hardware concurrency (at least 1).
unsigned worker_threads();

}  // namespace tokfuse::cli
