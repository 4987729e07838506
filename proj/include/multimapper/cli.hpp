#pragma once

#include <ostream>

namespace mm::cli {

// Exit codes: 0 success, 2 usage or configuration error, 3 I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Entry point of the `multimapper` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mm::cli
