#pragma once

#include <iosfwd>

namespace reachnav {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitGoalMissed = 3 };

/// Entry point for the `hull`, `reach`, `plan` and `verify` subcommands.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reachnav
