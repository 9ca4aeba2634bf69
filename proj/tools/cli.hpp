#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace iconrag::cli {

enum ExitStatus : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitPartial = 3,  ///< batch finished but some items failed
};

/// Runs one command line (without the program name). Results go to `out`,
/// log lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env);

/// Same, reading the process environment.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iconrag::cli
