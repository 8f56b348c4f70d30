#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nerkit {

/// Runs the command-line tool in-process. `args` excludes the program name.
/// Returns 0 on success, 1 on user or data errors, 2 on internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nerkit
