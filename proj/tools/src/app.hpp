#pragma once

#include <ostream>

namespace hallfiber::cli {

/// Exit statuses of the command-line tool.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Parses argv and runs one command. Data written to "-" goes to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hallfiber::cli
