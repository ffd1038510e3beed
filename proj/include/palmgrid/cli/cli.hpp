#pragma once

#include <iosfwd>

namespace palmgrid::cli {

/// Exit codes: 0 success, 1 runtime or config failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `palmgrid` tool. Failures print one line
/// `palmgrid: error: <category>: <message>` to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace palmgrid::cli
