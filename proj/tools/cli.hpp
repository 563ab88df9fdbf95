#pragma once

#include <iosfwd>

namespace corae::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,  // validation or analysis failure
  kUsage = 2,
  kIo = 3,
};

// Entry point shared by the `corae` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corae::cli
