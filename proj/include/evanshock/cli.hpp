#ifndef EVANSHOCK_CLI_HPP
#define EVANSHOCK_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace evanshock::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUnstable = 2,          // a nonzero winding number was found
  kNumericalFailure = 3,
  kUsage = 64,
};

/// Runs one subcommand (profile, bounds, evans, winding, sweep, evolve,
/// validate); `args` excludes the program name. Artifacts go under --out-dir,
/// progress to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Closest known long option to `flag` ("" when nothing is close).
std::string suggest_option(const std::string& flag, const std::vector<std::string>& known);

}  // namespace evanshock::cli

#endif  // EVANSHOCK_CLI_HPP
