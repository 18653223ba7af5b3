#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alley {

// Entry point behind main(): parses arguments, runs the configured
// experiments, writes result files and a summary table.
// Exit codes: 0 success, 1 configuration error, 2 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alley
