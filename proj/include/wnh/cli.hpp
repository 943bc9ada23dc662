#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wnh {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

// Runs one command line (args[0] is the program name). Results go to files
// under --out; summaries to `out`, progress and errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wnh
