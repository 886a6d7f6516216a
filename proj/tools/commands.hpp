// Command-line front end. run_cli is the whole program minus process exit,
// so tests can drive it in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weaklim::cli {

enum ExitCode : int { pass = 0, math_failure = 1, input_error = 2 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace weaklim::cli
