#pragma once

#include <iosfwd>

namespace dfpp::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kUnknown = 3, kBadData = 4 };

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dfpp::cli
