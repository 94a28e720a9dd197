#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aaseq {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumerical = 3,
};

/// Entry point of the `aaseq` command line tool. `args[0]` is the program
/// name. Subcommands: synth, embed, train, sweep, report, replay.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aaseq
