#pragma once

#include <iosfwd>

namespace curev::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand. Usage errors return 2; a failing
/// stage returns 1 after writing {"command", "stage", "error"} to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curev::cli
