#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsbm {

/// Exit codes: 0 success, 1 internal error, 2 usage or input error.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2 };

/// Entry point of the `nsbm` tool (simulate | fit | summarize | eval).
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsbm
