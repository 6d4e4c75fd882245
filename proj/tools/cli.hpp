#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsf::cli {

// Exit codes of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kCheckFailure = 4;

// Runs the tool on argv-style arguments (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsf::cli
