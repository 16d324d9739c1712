#pragma once

#include <iosfwd>

namespace projprime::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kDomain = 2, kIntegrity = 3, kUsage = 64 };

/// Entry point of the projprime tool; streams are injected for testing.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace projprime::cli
