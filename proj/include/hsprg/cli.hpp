#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsprg::cli {

enum ExitCode : int { kOk = 0, kInvariantFailed = 1, kUsage = 2 };

/// Runs one subcommand. `args` excludes the program name. Reports go to `out`
/// (or the --output file), diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hsprg::cli
