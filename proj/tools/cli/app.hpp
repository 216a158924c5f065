#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlqm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kNumericError = 3,
};

/// Runs one command. `args` excludes the program name. Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace nlqm::cli
