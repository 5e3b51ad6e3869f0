#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sip::cli {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,           // bad arguments, unreadable/malformed input or config
    kInfeasibleLag = 3,   // lag order too large for the series
    kDegenerate = 4,      // variance estimate not positive
    kInfeasibleDesign = 5 // simulation design cannot be realised
};

/// Runs `sip <subcommand> ...`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sip::cli
