#pragma once

#include <exception>
#include <iosfwd>

namespace kinex::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

/// Entry point of the `kinex` tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Exit status for an exception escaping a subcommand.
int exit_code_for(const std::exception& e);

}  // namespace kinex::cli
