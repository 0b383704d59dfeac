#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bhp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kConvergenceError = 3,
};

std::string_view version();

/// Entry point behind the `bhp` executable. Subcommands: spectrum, tabulate,
/// sample, synth, analyze. Never throws; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bhp::cli
