#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nanophot {

enum ExitCode { kExitOk = 0, kExitUsage = 2, kExitInternal = 3 };

// Entry point shared by the executable and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nanophot
