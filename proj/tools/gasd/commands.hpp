#pragma once

namespace gasd::cli {

inline constexpr const char* kVersion = "0.3.0";

/// Exit codes: 0 success, 2 input/format error, 3 infeasible configuration.
enum ExitCode : int { kOk = 0, kInputError = 2, kInfeasible = 3 };

int run(int argc, char** argv);

}  // namespace gasd::cli
