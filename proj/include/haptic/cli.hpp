#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace haptic::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum ExitStatus : int { Success = 0, Usage = 2, Validation = 3, Numerical = 4 };

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace haptic::cli
