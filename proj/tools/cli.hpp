#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ghs::cli {

/// Runs the command line (args[0] is the program name). Reports go to out,
/// diagnostics to err. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ghs::cli
