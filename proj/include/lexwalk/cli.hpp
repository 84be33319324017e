#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexwalk::cli {

/// Runs one command line (args[0] is the program name). Module errors are
/// printed to `err` as `{"error": <name>, "message": <text>}`.
/// Exit status: 0 success, 2 module error, 64 usage error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace lexwalk::cli
