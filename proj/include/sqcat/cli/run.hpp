#pragma once

#include <iosfwd>

#include "sqcat/cli/config.hpp"

namespace sqcat::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kValidationError = 3,
  kTruncationError = 4,
  kContractError = 5,
};

/// Runs the scenario and writes its files into config.out_dir(). Throws the
/// library's error types on failure.
void execute(const RunConfig& config, std::ostream& log);

/// execute() with errors reported on `err` and mapped to an exit code.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Exit code for an exception escaping execute() or config parsing.
int exit_code_for(const std::exception& e);

}  // namespace sqcat::cli
