#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dfvem::cli {

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Runs the command line (argv[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfvem::cli
