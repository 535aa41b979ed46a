#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace handgest::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

// Runs one invocation. `args` excludes the program name. Frames for the
// stream command are read from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace handgest::cli
