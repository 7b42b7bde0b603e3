#pragma once

#include <string>
#include <vector>

namespace hslice {

// argv-style entry point, argv[0] excluded. Exit codes: 0 success (an
// exhausted witness budget still counts), 1 a checked bound failed,
// 2 usage/parse error, 3 enumeration cap exceeded. Every run prints a
// key=value manifest to stdout; artifacts go to the --output paths.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace hslice
