#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcs::cli {

// Exit codes: 0 success (or balanced), 1 unbalanced model, 2 invalid input.
inline constexpr int kOk = 0;
inline constexpr int kUnbalanced = 1;
inline constexpr int kInvalidInput = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcs::cli
