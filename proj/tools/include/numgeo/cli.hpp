#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace numgeo::cli {

/// Runs the numgeo command line and returns the process exit code:
/// 0 success, 2 input or config error, 3 data consistency error,
/// 4 numerical or analysis error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with args excluding the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace numgeo::cli
