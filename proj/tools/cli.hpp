#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace atypia {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNotConverged = 4,
  kExitIo = 5,
};

/// Entry point behind the `atypia` executable; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atypia
