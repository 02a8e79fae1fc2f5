#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace authentext::cli {

/// Runs one command line (args excludes the program name). Data goes to
/// `out`, logs and errors to `err`. Returns the process exit status: 0 on
/// success, 2 for usage errors, 1 for everything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace authentext::cli
