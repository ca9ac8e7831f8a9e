#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bowae {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 iff every requested output was written.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bowae
