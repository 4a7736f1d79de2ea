#pragma once

#include <string>
#include <vector>

namespace sparsets {

/// Runs one `sparsets` command. argv[0] is the program name. Returns 0 on
/// success, 1 on a usage or input error, 2 on a runtime failure.
int parse_and_dispatch(const std::vector<std::string>& argv);
int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace sparsets
