#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adipredict::cli {

enum ExitCode : int {
    ExitOk = 0,
    ExitUsage = 2,    // bad arguments or unusable input
    ExitInternal = 3, // unexpected failure
};

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace adipredict::cli
