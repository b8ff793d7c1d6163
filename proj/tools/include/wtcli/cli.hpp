#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wtcli {

// Full command dispatch, separated from main() so tests can drive it
// in-process. argv excludes the program name. Returns the process exit
// code: 0 success, 1 usage/input error, 2 verdict failure.
int dispatch(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err);

}  // namespace wtcli
