#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace boostkit {

/// Process exit codes of the boostkit command.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

/// Runs `boostkit <subcommand> ...`; args[0] is the program name.
/// Subcommands: train, predict, eval, cde {train|sample|quantile|dist}, active.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace boostkit
