#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spatialecon::cli {

/// Process exit statuses.
enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kIoError = 3,
  kComputationError = 4,
};

/// Runs one invocation; `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spatialecon::cli
