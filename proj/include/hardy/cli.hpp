#pragma once

#include <ostream>

namespace hardy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFalse = 1;
inline constexpr int kExitInputError = 2;

/// Runs one command line; reports go to `out`, diagnostics to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hardy::cli
