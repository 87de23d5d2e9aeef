#pragma once

#include <cstdint>
#include <iosfwd>

namespace kinex::cli {

/// Runs the oracle checks, one line per check. Returns the number of failures.
int run_selftest(std::ostream& out, std::uint64_t seed, bool verbose = false);

}  // namespace kinex::cli
