#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptres {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kNumerical = 2;
inline constexpr int kInconclusive = 3;
inline constexpr int kNotFree = 4;
}  // namespace exit_code

/// Runs one invocation of the command-line tool; args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptres
