#pragma once

#include <string>
#include <vector>

namespace sscf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitNumerics = 4;

/// Runs the command line given the argv tail (no program name).
/// Exit codes: 0 success, 2 input/spec error, 3 verification/predicate
/// failure, 4 numerical non-convergence.
int run(const std::vector<std::string>& args);

}  // namespace sscf::cli
