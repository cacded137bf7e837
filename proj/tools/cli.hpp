#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aota::cli {

enum ExitCode : int {
    kOk = 0,
    kSimulationFailure = 1, // also file I/O errors
    kUsage = 2,
    kParseError = 3,
};

/// Runs one invocation. `args` excludes the program name. Data goes to `out`
/// (or the --out file), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aota::cli
