#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace subembed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitInputError = 2;

// Runs one subcommand (gen-matrix | verify | trial | sweep | embed-points |
// width | constants). args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subembed::cli
