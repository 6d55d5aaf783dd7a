#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

#include "fairwrite/errors.hpp"

namespace fairwrite::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // runtime failure, failed validation, eval over error budget
  kExitConfig = 2,
  kExitProvider = 3,
  kExitInput = 4,
  kExitInterrupted = 130,
};

int exit_code_for(ErrorKind kind);

/// Entry point shared by the binary and the tests. `cancel`, when given, is
/// polled by long-running commands (eval) and set by the SIGINT handler.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>* cancel = nullptr);

}  // namespace fairwrite::cli
