#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adt {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitNotCertified = 3,
};

/// Runs one CLI invocation; args excludes the program name.
/// Subcommands: quantile, optimize-time, optimize-destructive, efficiency, check, sweep.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adt
