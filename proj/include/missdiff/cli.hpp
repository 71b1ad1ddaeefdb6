#pragma once

#include <string>
#include <vector>

namespace missdiff {

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime
// failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace missdiff
