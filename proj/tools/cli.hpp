#pragma once

// Command-line front end. Exit codes: 0 success, 1 invalid input or usage,
// 2 numerical failure.

#include <string>
#include <vector>

namespace syncnet::cli {

int cli_main(int argc, char** argv);
/// Same as cli_main with args[0] taken as the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace syncnet::cli
