#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harvest::cli {

/// Process exit codes of harvest-cli.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kRuntimeError = 3,
};

/// Environment variable holding the default worker count.
inline constexpr const char* kWorkersEnv = "HARVEST_WORKERS";

/// Runs the command line `args` (args[0] is the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harvest::cli
