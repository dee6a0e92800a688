#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgbxy {

/// Exit codes: 0 success, 1 processing error, 2 usage error.
int cli_main(int argc, const char* const* argv);

/// Same, with arguments after the program name and explicit streams.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rgbxy
