#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddlqr::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,      ///< bad arguments, unreadable or unwritable files
  kNumerical = 2,  ///< solver failure or a --check threshold exceeded
  kDataPoor = 3,   ///< rank[U0T; X0T] < n + m
};

/// Entry point behind the `ddlqr` executable. Commands: collect, solve,
/// riccati, montecarlo, reactor. Every command also accepts
/// `--config file.json`, an object whose keys are long option names;
/// options given on the command line win over the file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the program name prepended to `args`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddlqr::cli
