#pragma once

#include <exception>
#include <iosfwd>

namespace labelvar::cli {

// Exit codes shared by every verb.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,       // bad flags, query syntax, unknown column
  kData = 3,        // unreadable or malformed input, degenerate statistics
  kInfeasible = 4,  // fixture spec cannot be realized
};

int exit_code_for(const std::exception& e);

// Entry point behind the `labelvar` binary; out and err replace the standard
// streams so tests can run it in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace labelvar::cli
