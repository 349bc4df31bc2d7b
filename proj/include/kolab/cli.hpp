#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kolab {

// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or config error.
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kolab
