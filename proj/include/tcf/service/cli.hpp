#pragma once
// tcf command line: simulate | train | evaluate | forecast | recommend | serve.
// Returns the process exit code; usage errors are non-zero.

#include <ostream>
#include <string>
#include <vector>

namespace tcf::service {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcf::service
