#pragma once

#include <ostream>

namespace lqss::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInvalidInput = 2,
  kRankAmbiguity = 3,
  kWriteFailure = 4,
  kVerifyFailure = 5,
};

/// Entry point shared by the lqss binary and the tests. Subcommands: analyze,
/// decompose, verify, example, generate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lqss::cli
