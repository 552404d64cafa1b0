#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcocr::cli {

// Exit status: 0 success, 1 domain error, 2 usage error. Diagnostics go to
// err; data goes to files or out.
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gcocr::cli
