#pragma once

#include <iosfwd>

namespace star {

/// Exit status contract of the `star` binary.
enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitDomain = 3, kExitIo = 4 };

/// Runs one `star` invocation, writing results to `out` and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace star
