#pragma once

#include <iosfwd>

namespace wavebench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBreach = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;

/// Entry point of the `wavebench` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavebench::cli
