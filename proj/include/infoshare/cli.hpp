#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infoshare {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitUsage = 2 };

/// Runs the CLI with `args` (args[0] is the program name). Machine-readable
/// output goes to `out` (or --out), human-readable summaries to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infoshare
