#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace magkerr::cli {

/// Exit codes: 0 success, 1 usage or config error, 2 physics failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPhysics = 2;

/// Runs one invocation; `args` excludes the program name. Human-readable
/// output goes to `out`, diagnostics to `err`, tables to --output files.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magkerr::cli
