#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace raingen::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInternal = 2 };

/// Runs one command line (without the program name). Everything the tool
/// prints goes to `out` / `err`; files go to the output directory.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace raingen::cli
