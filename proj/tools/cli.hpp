#pragma once

#include <iosfwd>

namespace meshinit::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kNonTermination = 4,
  kThresholdFailure = 5,
};

/// Entry point of the meshinit tool. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace meshinit::cli
