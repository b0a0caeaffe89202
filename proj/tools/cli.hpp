#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpld::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;

/// Parses args (without the program name) and runs one subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

/// "start:stop[:count]" (linear or log spaced), "a,b,c", or a single value.
std::vector<double> parse_grid(const std::string& spec, const std::string& scale, const std::string& flag);

}  // namespace fpld::cli
