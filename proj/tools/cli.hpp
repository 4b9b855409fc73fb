#pragma once

#include <iosfwd>

namespace qcompress {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitParse = 2, kExitNumeric = 3, kExitDimension = 4, kExitVerify = 5 };

// Entry point of the qcompress tool; reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcompress
