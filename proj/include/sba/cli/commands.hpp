#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sba::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
};

// Runs one command line (program name excluded), e.g. {"generate", "--out", "run1"}.
// Diagnostics go to err; summary lines to out. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sba::cli
