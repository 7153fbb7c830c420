#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace berkgreen::cli {

/// Exit codes of the command-line tool.
inline constexpr int kOk = 0;
inline constexpr int kNumerical = 1;
inline constexpr int kInput = 2;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace berkgreen::cli
